#include "csvor/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csvor/common.hpp"

namespace csvor {
namespace {

void check_label(int label, int num_classes, const Eigen::VectorXd& b) {
  if (label < 1 || label > num_classes) {
    throw InvalidArgument("label " + std::to_string(label) + " outside 1.." +
                          std::to_string(num_classes));
  }
  if (b.size() != num_classes - 1) {
    throw InvalidArgument("threshold vector must have K-1 entries");
  }
}

}  // namespace

HingeMask hinge_mask(int label, int num_classes) {
  if (label == 1) return HingeMask::kUpperOnly;
  if (label == num_classes) return HingeMask::kLowerOnly;
  return HingeMask::kBoth;
}

HingePair hinge_components(double score, int label, const Eigen::VectorXd& thresholds,
                           int num_classes) {
  check_label(label, num_classes, thresholds);
  HingePair h;
  h.mask = hinge_mask(label, num_classes);
  if (has_lower(h.mask)) h.lower = std::max(0.0, 1.0 - score + thresholds(label - 2));
  if (has_upper(h.mask)) h.upper = std::max(0.0, 1.0 + score - thresholds(label - 1));
  return h;
}

double capped_lp_loss(const HingePair& h, double p, double eps_g, double delta) {
  if (!(p > 0.0 && p <= 2.0)) throw InvalidArgument("p must lie in (0, 2]");
  if (!(eps_g > 0.0)) throw InvalidArgument("eps_g must be positive");
  const double g = h.squared_norm();
  if (g >= eps_g) return std::pow(eps_g + delta, 0.5 * p);
  return std::pow(g + delta, 0.5 * p);
}

double slack_residual_g(double score, int label, const Eigen::VectorXd& thresholds,
                        int num_classes, const SlackPair& m) {
  check_label(label, num_classes, thresholds);
  const HingeMask mask = hinge_mask(label, num_classes);
  double g = 0.0;
  if (has_lower(mask)) {
    const double r = score - thresholds(label - 2) - 1.0 - m.m_lower;
    g += r * r;
  }
  if (has_upper(mask)) {
    const double r = score - thresholds(label - 1) + 1.0 + m.m_upper;
    g += r * r;
  }
  return g;
}

SlackPair optimal_slack(double score, int label, const Eigen::VectorXd& thresholds,
                        int num_classes) {
  check_label(label, num_classes, thresholds);
  const HingeMask mask = hinge_mask(label, num_classes);
  SlackPair m;
  if (has_lower(mask)) m.m_lower = std::max(0.0, score - thresholds(label - 2) - 1.0);
  if (has_upper(mask)) m.m_upper = std::max(0.0, thresholds(label - 1) - 1.0 - score);
  return m;
}

double capped_objective(const LinearOrdinal& model, const Dataset& ds, double gamma, double p,
                        double eps_g, double delta) {
  if (model.w.size() != static_cast<Eigen::Index>(ds.dim())) {
    throw InvalidArgument("capped_objective: w has wrong dimension");
  }
  const Eigen::VectorXd scores = ds.features * model.w;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto h = hinge_components(scores(static_cast<Eigen::Index>(i)), ds.labels[i], model.b,
                                    ds.num_classes);
    total += capped_lp_loss(h, p, eps_g, delta);
  }
  return total + gamma * model.w.squaredNorm();
}

double surrogate_objective(const LinearOrdinal& model, const Dataset& ds,
                           const std::vector<SlackPair>& slack, const Eigen::VectorXd& weights,
                           double gamma) {
  if (slack.size() != ds.size() || static_cast<std::size_t>(weights.size()) != ds.size()) {
    throw InvalidArgument("surrogate_objective: slack/weight length mismatch");
  }
  const Eigen::VectorXd scores = ds.features * model.w;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (weights(idx) == 0.0) continue;
    total += weights(idx) *
             slack_residual_g(scores(idx), ds.labels[i], model.b, ds.num_classes, slack[i]);
  }
  return total + gamma * model.w.squaredNorm();
}

}  // namespace csvor
