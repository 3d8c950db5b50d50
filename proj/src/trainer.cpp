#include "csvor/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "csvor/common.hpp"

namespace csvor {

void HyperParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive and finite");
  if (!(p > 0.0 && p <= 2.0)) throw InvalidArgument("p must lie in (0, 2]");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be positive");
  if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
  if (!(rel_tol >= 0.0)) throw InvalidArgument("rel_tol must be nonnegative");
  if (eps.kind == EpsPolicy::Kind::kFixed) {
    if (!(eps.value > 0.0)) throw InvalidArgument("fixed eps must be positive");
  } else {
    if (!(eps.fraction >= 0.0 && eps.fraction < 1.0)) {
      throw InvalidArgument("eps fraction must lie in [0, 1)");
    }
    if (eps.warmup_iters < 0) throw InvalidArgument("eps warmup must be nonnegative");
    if (!(eps.floor > 0.0)) throw InvalidArgument("eps floor must be positive");
  }
}

double HyperParams::fixed_eps_g() const {
  if (cap_scale == CapScale::kG || std::isinf(eps.value)) return eps.value;
  return std::pow(eps.value, 2.0 / p);
}

Eigen::VectorXd update_weights_d(const Eigen::VectorXd& g, double p, double eps_g, double delta) {
  Eigen::VectorXd d(g.size());
  const double expo = 0.5 * (p - 2.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g(i) <= eps_g) {
      d(i) = expo == 0.0 ? 0.5 * p : 0.5 * p * std::pow(g(i) + delta, expo);
    } else {
      d(i) = 0.0;
    }
  }
  return d;
}

double epsilon_update(const Eigen::VectorXd& g, const EpsPolicy& policy, int iteration,
                      double current) {
  if (policy.kind == EpsPolicy::Kind::kFixed) return policy.value;
  if (iteration > policy.warmup_iters || g.size() == 0) return current;
  std::vector<double> sorted(g.data(), g.data() + g.size());
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::ptrdiff_t>(std::ceil((1.0 - policy.fraction) * n - 1e-9));
  rank = std::clamp<std::ptrdiff_t>(rank, 1, static_cast<std::ptrdiff_t>(sorted.size()));
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  const double candidate = std::max(policy.floor, sorted[static_cast<std::size_t>(rank - 1)]);
  return std::min(current, candidate);
}

namespace {

struct Term {
  Eigen::Index sample;
  Eigen::Index threshold;  // zero-based index into b
  double kappa;            // residual is x'w - b_t - kappa
  double weight;
};

// J(w, b) = sum_terms weight (x'w - b_t - kappa)^2 + gamma |w|^2, written as
// 0.5 z'Qz + c'z with a = (x; -e_t).
QpProblem assemble(const Dataset& ds, const std::vector<Term>& terms, double gamma) {
  const auto d = static_cast<Eigen::Index>(ds.dim());
  const Eigen::Index nb = ds.num_classes - 1;
  const Eigen::Index n = d + nb;
  const auto nn = static_cast<Eigen::Index>(ds.size());

  Eigen::VectorXd count_weight = Eigen::VectorXd::Zero(nn);
  Eigen::VectorXd kappa_weight = Eigen::VectorXd::Zero(nn);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(d, nb);
  Eigen::VectorXd bb = Eigen::VectorXd::Zero(nb);
  Eigen::VectorXd cb = Eigen::VectorXd::Zero(nb);
  for (const Term& t : terms) {
    count_weight(t.sample) += t.weight;
    kappa_weight(t.sample) += t.weight * t.kappa;
    cross.col(t.threshold) -= t.weight * ds.features.row(t.sample).transpose();
    bb(t.threshold) += t.weight;
    cb(t.threshold) += t.weight * t.kappa;
  }

  QpProblem qp;
  qp.Q = Eigen::MatrixXd::Zero(n, n);
  qp.Q.topLeftCorner(d, d) =
      2.0 * (ds.features.transpose() * count_weight.asDiagonal() * ds.features);
  qp.Q.topLeftCorner(d, d).diagonal().array() += 2.0 * gamma;
  qp.Q.topRightCorner(d, nb) = 2.0 * cross;
  qp.Q.bottomLeftCorner(nb, d) = 2.0 * cross.transpose();
  qp.Q.bottomRightCorner(nb, nb).diagonal() = 2.0 * bb;
  qp.c.resize(n);
  qp.c.head(d) = -2.0 * (ds.features.transpose() * kappa_weight);
  qp.c.tail(nb) = 2.0 * cb;

  const Eigen::Index m = std::max<Eigen::Index>(nb - 1, 0);
  qp.G = Eigen::MatrixXd::Zero(m, n);
  qp.h = Eigen::VectorXd::Zero(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    qp.G(k, d + k) = 1.0;
    qp.G(k, d + k + 1) = -1.0;
  }
  return qp;
}

void check_lengths(const Dataset& ds, const Eigen::VectorXd& weights) {
  if (static_cast<std::size_t>(weights.size()) != ds.size()) {
    throw InvalidArgument("weight vector length does not match the dataset");
  }
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw InvalidArgument("weights must be finite and nonnegative");
  }
}

LinearOrdinal zero_model(const Dataset& ds) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ds.dim())),
          Eigen::VectorXd::Zero(ds.num_classes - 1)};
}

WbResult degenerate_result(const Dataset& ds, const LinearOrdinal* previous) {
  warn("every sample weight is zero; keeping the previous model");
  WbResult out;
  out.degenerate = true;
  out.model = previous ? *previous : zero_model(ds);
  out.qp.status = QpStatus::kOptimal;
  out.qp.certified = true;
  return out;
}

Eigen::VectorXd stack(const LinearOrdinal& m) {
  Eigen::VectorXd z(m.w.size() + m.b.size());
  z << m.w, m.b;
  return z;
}

LinearOrdinal unstack(const Eigen::VectorXd& z, Eigen::Index d) {
  return {z.head(d), z.tail(z.size() - d)};
}

// Margin residuals r = x'w - b_t - kappa of every weighted component; the
// squared hinge of a component is max(0, sign * r)^2 with sign = -1 for the
// lower margin and +1 for the upper one.
struct Components {
  std::vector<Term> terms;  // kappa = 1 (lower) or -1 (upper)
  std::vector<double> sign;
};

Components weighted_components(const Dataset& ds, const Eigen::VectorXd& weights) {
  Components c;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (weights(ii) == 0.0) continue;
    const int y = ds.labels[i];
    const HingeMask mask = hinge_mask(y, ds.num_classes);
    if (has_lower(mask)) {
      c.terms.push_back({ii, y - 2, 1.0, weights(ii)});
      c.sign.push_back(-1.0);
    }
    if (has_upper(mask)) {
      c.terms.push_back({ii, y - 1, -1.0, weights(ii)});
      c.sign.push_back(1.0);
    }
  }
  return c;
}

Eigen::VectorXd component_residuals(const Dataset& ds, const Components& c,
                                    const LinearOrdinal& m) {
  const Eigen::VectorXd scores = ds.features * m.w;
  Eigen::VectorXd r(static_cast<Eigen::Index>(c.terms.size()));
  for (std::size_t k = 0; k < c.terms.size(); ++k) {
    const Term& t = c.terms[k];
    r(static_cast<Eigen::Index>(k)) = scores(t.sample) - m.b(t.threshold) - t.kappa;
  }
  return r;
}

}  // namespace

QpProblem assemble_wb_qp(const Dataset& ds, const Eigen::VectorXd& weights,
                         const std::vector<SlackPair>& slack, double gamma) {
  check_lengths(ds, weights);
  if (slack.size() != ds.size()) throw InvalidArgument("slack length does not match the dataset");
  std::vector<Term> terms;
  terms.reserve(2 * ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (weights(ii) == 0.0) continue;
    const int y = ds.labels[i];
    const HingeMask mask = hinge_mask(y, ds.num_classes);
    if (has_lower(mask)) terms.push_back({ii, y - 2, 1.0 + slack[i].m_lower, weights(ii)});
    if (has_upper(mask)) terms.push_back({ii, y - 1, -(1.0 + slack[i].m_upper), weights(ii)});
  }
  return assemble(ds, terms, gamma);
}

WbResult solve_wb(const Dataset& ds, const Eigen::VectorXd& weights,
                  const std::vector<SlackPair>& slack, double gamma,
                  const LinearOrdinal* previous) {
  check_lengths(ds, weights);
  if ((weights.array() == 0.0).all()) return degenerate_result(ds, previous);
  const QpProblem qp = assemble_wb_qp(ds, weights, slack, gamma);
  std::optional<Eigen::VectorXd> start;
  if (previous) start = stack(*previous);
  WbResult out;
  out.qp = solve_qp(qp, start);
  out.model = unstack(out.qp.z, static_cast<Eigen::Index>(ds.dim()));
  return out;
}

double weighted_squared_hinge(const LinearOrdinal& model, const Dataset& ds,
                              const Eigen::VectorXd& weights, double gamma) {
  check_lengths(ds, weights);
  const Eigen::VectorXd scores = ds.features * model.w;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (weights(ii) == 0.0) continue;
    total += weights(ii) *
             hinge_components(scores(ii), ds.labels[i], model.b, ds.num_classes).squared_norm();
  }
  return total + gamma * model.w.squaredNorm();
}

WbResult solve_wbm(const Dataset& ds, const Eigen::VectorXd& weights, double gamma,
                   const LinearOrdinal* previous) {
  check_lengths(ds, weights);
  if ((weights.array() == 0.0).all()) return degenerate_result(ds, previous);
  const auto d = static_cast<Eigen::Index>(ds.dim());
  const Components comps = weighted_components(ds, weights);
  const auto nc = static_cast<Eigen::Index>(comps.terms.size());

  WbResult out;
  LinearOrdinal current = previous ? *previous : zero_model(ds);
  constexpr int kMaxSteps = 100;
  std::vector<char> active(comps.terms.size(), 0);
  for (int step = 1; step <= kMaxSteps; ++step) {
    out.newton_steps = step;
    const Eigen::VectorXd r = component_residuals(ds, comps, current);
    std::vector<Term> terms;
    for (Eigen::Index k = 0; k < nc; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      active[kk] = comps.sign[kk] * r(k) > 0.0;
      if (active[kk]) terms.push_back(comps.terms[kk]);
    }
    out.qp = solve_qp(assemble(ds, terms, gamma), stack(current));
    const LinearOrdinal target = unstack(out.qp.z, d);

    // The piece's minimizer is optimal for the whole problem when it keeps
    // every active margin violated and every inactive one satisfied.
    const Eigen::VectorXd r_new = component_residuals(ds, comps, target);
    bool consistent = true;
    for (Eigen::Index k = 0; k < nc && consistent; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const double v = comps.sign[kk] * r_new(k);
      consistent = active[kk] ? v >= 0.0 : v <= 0.0;
    }
    if (consistent) {
      current = target;
      break;
    }

    // Exact line search on the convex piecewise quadratic along the step.
    const Eigen::VectorXd dr = r_new - r;
    const Eigen::VectorXd dw = target.w - current.w;
    auto slope = [&](double t) {
      double s = 2.0 * gamma * (current.w + t * dw).dot(dw);
      for (Eigen::Index k = 0; k < nc; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double v = comps.sign[kk] * (r(k) + t * dr(k));
        if (v > 0.0) s += 2.0 * comps.terms[kk].weight * v * comps.sign[kk] * dr(k);
      }
      return s;
    };
    double t = 1.0;
    if (slope(1.0) > 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) > 0.0 ? hi : lo) = mid;
      }
      t = lo;
    }
    if (t == 0.0) break;
    LinearOrdinal next{current.w + t * dw, current.b + t * (target.b - current.b)};
    if (weighted_squared_hinge(next, ds, weights, gamma) >
        weighted_squared_hinge(current, ds, weights, gamma)) {
      break;
    }
    current = std::move(next);
  }
  out.model = std::move(current);
  return out;
}

namespace {

void enforce_order(Eigen::VectorXd& b) {
  for (Eigen::Index k = 1; k < b.size(); ++k) b(k) = std::max(b(k), b(k - 1));
}

}  // namespace

TrainResult train_csvor(const Dataset& ds, const HyperParams& hp,
                        const IterationObserver& observer) {
  ds.validate_for_training();
  hp.validate();
  const std::size_t n = ds.size();
  const auto nn = static_cast<Eigen::Index>(n);

  TrainState st;
  st.d_weights = Eigen::VectorXd::Ones(nn);
  st.slack.assign(n, SlackPair{});
  st.g = Eigen::VectorXd::Zero(nn);
  st.eps_g = hp.eps.kind == EpsPolicy::Kind::kFixed ? hp.fixed_eps_g()
                                                     : std::numeric_limits<double>::infinity();

  LinearOrdinal model;
  bool have_model = false;
  double previous_objective = 0.0;

  for (int t = 1; t <= hp.max_iters; ++t) {
    if ((st.d_weights.array() == 0.0).all()) {
      warn("all samples are capped; stopping at iteration " + std::to_string(t - 1));
      st.degenerate = true;
      break;
    }
    st.last_solve_weights = st.d_weights;

    WbResult wb = solve_wbm(ds, st.d_weights, hp.gamma, have_model ? &model : nullptr);
    if (!wb.qp.certified) {
      ++st.uncertified_solves;
      warn("(w, b) subproblem not certified at iteration " + std::to_string(t));
    }
    if (have_model) {
      // The solve must not lose ground on the problem it was given.
      const double before = weighted_squared_hinge(model, ds, st.d_weights, hp.gamma);
      const double after = weighted_squared_hinge(wb.model, ds, st.d_weights, hp.gamma);
      if (after > before) wb.model = model;
    }
    model = std::move(wb.model);
    have_model = true;

    const Eigen::VectorXd scores = ds.features * model.w;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      st.slack[i] = update_slack_m(scores(ii), ds.labels[i], model.b, ds.num_classes);
      st.g(ii) = slack_residual_g(scores(ii), ds.labels[i], model.b, ds.num_classes, st.slack[i]);
    }
    const double eps_before = st.eps_g;
    if (hp.eps.kind == EpsPolicy::Kind::kQuantile) {
      st.eps_g = epsilon_update(st.g, hp.eps, t, st.eps_g);
    }
    st.d_weights = update_weights_d(st.g, hp.p, st.eps_g, hp.delta);

    const double objective = capped_objective(model, ds, hp.gamma, hp.p, st.eps_g, hp.delta);
    st.objective_trace.push_back(objective);
    st.iteration = t;

    if (observer) {
      observer(IterationSnapshot{t, st.last_solve_weights, model, wb.qp,
                                 st.slack, st.g, st.eps_g, st.d_weights, objective});
    }

    const bool same_flags =
        ((st.d_weights.array() == 0.0) == (st.last_solve_weights.array() == 0.0)).all();
    if (t > 1 && st.eps_g == eps_before && same_flags &&
        previous_objective - objective <= hp.rel_tol * std::fabs(previous_objective)) {
      st.converged = true;
      break;
    }
    previous_objective = objective;
  }

  TrainResult result;
  result.model.w = model.w;
  result.model.b = model.b;
  enforce_order(result.model.b);
  result.model.num_classes = ds.num_classes;
  result.model.method = Method::kCsvor;
  result.model.gamma = hp.gamma;
  result.model.p = hp.p;
  result.model.eps_g = st.eps_g;
  result.model.cap_scale = hp.cap_scale;
  result.state = std::move(st);
  return result;
}

std::vector<OutlierEntry> outlier_report(const TrainState& state) {
  std::vector<OutlierEntry> out;
  out.reserve(static_cast<std::size_t>(state.g.size()));
  for (Eigen::Index i = 0; i < state.g.size(); ++i) {
    const double d = state.d_weights(i);
    out.push_back({static_cast<std::size_t>(i), state.g(i), d, d == 0.0});
  }
  return out;
}

}  // namespace csvor
