#include "csvor/qp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Jacobi>
#include <algorithm>
#include <cmath>
#include <limits>

namespace csvor {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// QR factorization of the working-set normals, A = G_W' = U [R; 0], kept up
// to date with Givens rotations as constraints enter and leave. The trailing
// n - a columns of U span the null space of the working set.
class WorkingSetFactor {
 public:
  explicit WorkingSetFactor(Index n) : n_(n), U_(MatrixXd::Identity(n, n)), R_(MatrixXd::Zero(n, n)) {}

  Index size() const { return a_; }
  Index null_dim() const { return n_ - a_; }
  auto null_basis() const { return U_.rightCols(n_ - a_); }

  // Appends the normal g unless it lies (numerically) in the current span.
  bool add(const VectorXd& g) {
    if (a_ >= n_) return false;
    VectorXd v = U_.transpose() * g;
    const double tail = v.tail(n_ - a_).norm();
    if (!(tail > 1e-10 * std::max(g.norm(), 1e-300))) return false;
    for (Index k = n_ - 1; k > a_; --k) {
      if (v(k) == 0.0) continue;
      Eigen::JacobiRotation<double> rot;
      rot.makeGivens(v(k - 1), v(k));
      v.applyOnTheLeft(k - 1, k, rot.adjoint());
      U_.applyOnTheRight(k - 1, k, rot);
      v(k) = 0.0;
    }
    R_.col(a_).setZero();
    R_.col(a_).head(a_ + 1) = v.head(a_ + 1);
    ++a_;
    return true;
  }

  // Drops the constraint stored in column pos.
  void remove(Index pos) {
    for (Index c = pos; c + 1 < a_; ++c) R_.col(c) = R_.col(c + 1);
    R_.col(a_ - 1).setZero();
    for (Index k = pos; k + 1 < a_; ++k) {
      Eigen::JacobiRotation<double> rot;
      rot.makeGivens(R_(k, k), R_(k + 1, k));
      R_.applyOnTheLeft(k, k + 1, rot.adjoint());
      U_.applyOnTheRight(k, k + 1, rot);
      R_(k + 1, k) = 0.0;
    }
    --a_;
    R_.row(a_).setZero();
  }

  // Solves G_W' mu = rhs in the least-squares sense.
  VectorXd multipliers(const VectorXd& rhs) const {
    if (a_ == 0) return VectorXd();
    VectorXd y = U_.leftCols(a_).transpose() * rhs;
    return R_.topLeftCorner(a_, a_).triangularView<Eigen::Upper>().solve(y);
  }

  void reset() {
    U_.setIdentity();
    R_.setZero();
    a_ = 0;
  }

 private:
  Index n_;
  Index a_ = 0;
  MatrixXd U_;
  MatrixXd R_;
};

struct CoreResult {
  VectorXd z;
  std::vector<Index> working;
  VectorXd mu;  // aligned with working
  int iterations = 0;
  bool optimal = false;
  bool degenerate = false;
  std::vector<double> trace;
};

// Primal active-set iterations from a feasible point.
CoreResult active_set_core(const MatrixXd& Q, const VectorXd& c, const MatrixXd& G,
                           const VectorXd& h, VectorXd z, int max_iterations, bool record) {
  const Index n = c.size();
  const Index m = h.size();
  CoreResult out;
  WorkingSetFactor factor(n);
  std::vector<Index> working;
  std::vector<char> in_working(static_cast<std::size_t>(m), 0);

  const double h_scale = 1.0 + inf_norm(h);
  const double q_scale = Q.size() == 0 ? 0.0 : Q.cwiseAbs().maxCoeff();

  auto rebuild = [&]() {
    factor.reset();
    std::vector<Index> kept;
    for (Index j : working) {
      if (factor.add(G.row(j).transpose())) {
        kept.push_back(j);
      } else {
        in_working[static_cast<std::size_t>(j)] = 0;
      }
    }
    working = std::move(kept);
  };

  // Initial working set: constraints active at the start, lowest index first.
  {
    const VectorXd slack = h - G * z;
    for (Index j = 0; j < m; ++j) {
      if (slack(j) <= 1e-11 * (1.0 + std::fabs(h(j))) && factor.add(G.row(j).transpose())) {
        working.push_back(j);
        in_working[static_cast<std::size_t>(j)] = 1;
      }
    }
  }

  auto objective = [&](const VectorXd& x) { return 0.5 * x.dot(Q * x) + c.dot(x); };
  if (record) out.trace.push_back(objective(z));

  bool at_subspace_min = false;
  int changes_since_rebuild = 0;
  int zero_steps = 0;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    const VectorXd Qz = Q * z;
    const VectorXd grad = Qz + c;
    const double g_scale = 1.0 + std::max(inf_norm(c), inf_norm(Qz));
    const double grad_tol = 1e-13 * g_scale;

    if (!at_subspace_min) {
      const Index nz = factor.null_dim();
      if (nz == 0) {
        at_subspace_min = true;
      } else {
        const MatrixXd Z = factor.null_basis();
        const VectorXd gr = Z.transpose() * grad;
        MatrixXd Hr = Z.transpose() * (Q * Z);
        Hr = 0.5 * (Hr + Hr.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Hr);
        const VectorXd& lam = eig.eigenvalues();
        const MatrixXd& V = eig.eigenvectors();
        const double lam_max = std::max(lam.maxCoeff(), 0.0);
        const double curv_tol = std::max(1e-14 * lam_max, 1e-15 * q_scale);
        const VectorXd coef = V.transpose() * gr;

        VectorXd v = VectorXd::Zero(nz);
        bool newton = true;
        for (Index j = 0; j < nz; ++j) {
          if (lam(j) <= curv_tol && std::fabs(coef(j)) > grad_tol) {
            v -= coef(j) * V.col(j);
            newton = false;
          }
        }
        if (newton) {
          bool any = false;
          for (Index j = 0; j < nz; ++j) {
            if (lam(j) > curv_tol && std::fabs(coef(j)) > grad_tol) {
              v -= (coef(j) / lam(j)) * V.col(j);
              any = true;
            }
          }
          if (!any) at_subspace_min = true;
        } else {
          out.degenerate = true;
        }

        if (!at_subspace_min) {
          const VectorXd p = Z * v;
          const VectorXd Gp = G * p;
          const VectorXd slack = h - G * z;
          const double p_norm = p.norm();
          double alpha = newton ? 1.0 : kInf;
          Index block = -1;
          for (Index j = 0; j < m; ++j) {
            if (in_working[static_cast<std::size_t>(j)]) continue;
            if (Gp(j) <= 1e-14 * G.row(j).norm() * p_norm) continue;
            const double sj = slack(j) <= 1e-12 * (1.0 + std::fabs(h(j))) ? 0.0 : slack(j);
            const double aj = sj / Gp(j);
            if (aj < alpha) {
              alpha = aj;
              block = j;
            }
          }
          if (block < 0 && !newton) {
            throw QpError(QpError::Kind::kUnbounded,
                          "QP objective is unbounded below along a zero-curvature direction");
          }
          z += alpha * p;
          if (record) out.trace.push_back(objective(z));
          const bool stalled = alpha * p_norm <= 1e-14 * (1.0 + z.norm());
          zero_steps = stalled ? zero_steps + 1 : 0;
          if (block >= 0) {
            if (factor.add(G.row(block).transpose())) {
              working.push_back(block);
              in_working[static_cast<std::size_t>(block)] = 1;
              ++changes_since_rebuild;
            }
          } else {
            at_subspace_min = true;
          }
        }
      }
    }

    if (at_subspace_min) {
      if (changes_since_rebuild > 50) {
        rebuild();
        changes_since_rebuild = 0;
      }
      const VectorXd mu = factor.multipliers(-(Q * z + c));
      const double dual_tol = 1e-11 * g_scale;
      Index drop = -1;
      if (zero_steps > 25) {
        // Bland-style: lowest constraint index with a negative multiplier.
        for (std::size_t k = 0; k < working.size(); ++k) {
          if (mu(static_cast<Index>(k)) < -dual_tol &&
              (drop < 0 || working[k] < working[static_cast<std::size_t>(drop)])) {
            drop = static_cast<Index>(k);
          }
        }
      } else {
        double most = -dual_tol;
        for (std::size_t k = 0; k < working.size(); ++k) {
          const double v = mu(static_cast<Index>(k));
          if (v < most || (drop >= 0 && v == most && working[k] < working[static_cast<std::size_t>(drop)])) {
            most = v;
            drop = static_cast<Index>(k);
          }
        }
      }
      if (drop < 0) {
        out.optimal = true;
        out.mu = mu;
        break;
      }
      in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(drop)])] = 0;
      working.erase(working.begin() + drop);
      factor.remove(drop);
      ++changes_since_rebuild;
      at_subspace_min = false;
    }
  }
  (void)h_scale;
  out.iterations = iter;
  if (!out.optimal) out.mu = factor.multipliers(-(Q * z + c));
  out.z = std::move(z);
  out.working = std::move(working);
  return out;
}

}  // namespace

double QpProblem::objective(const VectorXd& z) const { return 0.5 * z.dot(Q * z) + c.dot(z); }

void QpProblem::validate() const {
  const Index n = c.size();
  if (Q.rows() != n || Q.cols() != n) throw QpError(QpError::Kind::kBadInput, "Q must be n x n");
  if (G.cols() != n && !(G.rows() == 0)) throw QpError(QpError::Kind::kBadInput, "G must be m x n");
  if (G.rows() != h.size()) throw QpError(QpError::Kind::kBadInput, "G and h disagree in rows");
  if (!Q.allFinite() || !c.allFinite() || !G.allFinite() || !h.allFinite()) {
    throw QpError(QpError::Kind::kBadInput, "QP data must be finite");
  }
  if (n == 0) return;
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw QpError(QpError::Kind::kNotConvex, "Q is not symmetric");
  }
  const bool diagonal = (Q - MatrixXd(Q.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  const double min_eig =
      diagonal ? Q.diagonal().minCoeff()
               : Eigen::SelfAdjointEigenSolver<MatrixXd>(Q, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (min_eig < -1e-10 * scale) {
    throw QpError(QpError::Kind::kNotConvex, "Q is not positive semidefinite");
  }
}

double kkt_residual(const QpProblem& problem, const VectorXd& z, const VectorXd& duals) {
  const Index m = problem.num_constraints();
  if (z.size() != problem.num_variables() || duals.size() != m) {
    throw QpError(QpError::Kind::kBadInput, "kkt_residual: dimension mismatch");
  }
  VectorXd station = problem.Q * z + problem.c;
  if (m > 0) station += problem.G.transpose() * duals;
  double r = inf_norm(station);
  if (m > 0) {
    const VectorXd viol = problem.G * z - problem.h;
    for (Index j = 0; j < m; ++j) {
      r = std::max(r, std::max(viol(j), 0.0));
      r = std::max(r, std::max(-duals(j), 0.0));
      r = std::max(r, std::fabs(duals(j) * viol(j)));
    }
  }
  return r;
}

QpSolution solve_qp(const QpProblem& problem, const std::optional<VectorXd>& warm_start,
                    const QpOptions& options) {
  problem.validate();
  const Index n = problem.num_variables();
  const Index m = problem.num_constraints();
  const MatrixXd G = m > 0 ? problem.G : MatrixXd(0, n);
  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations : static_cast<int>(50 * (n + m) + 1000);

  VectorXd z0 = VectorXd::Zero(n);
  if (warm_start) {
    if (warm_start->size() != n) throw QpError(QpError::Kind::kBadInput, "warm start has wrong size");
    z0 = *warm_start;
  }

  QpSolution sol;
  int phase_one_iterations = 0;
  const double h_scale = 1.0 + inf_norm(problem.h);
  if (m > 0) {
    const double worst = (G * z0 - problem.h).maxCoeff();
    if (worst > 1e-12 * h_scale) {
      // Phase one: minimize t subject to Gz - t <= h, t >= 0.
      MatrixXd Ga = MatrixXd::Zero(m + 1, n + 1);
      Ga.topLeftCorner(m, n) = G;
      Ga.col(n).head(m).setConstant(-1.0);
      Ga(m, n) = -1.0;
      VectorXd ha(m + 1);
      ha << problem.h, 0.0;
      VectorXd ca = VectorXd::Zero(n + 1);
      ca(n) = 1.0;
      VectorXd za(n + 1);
      za << z0, worst;
      const MatrixXd Qa = MatrixXd::Zero(n + 1, n + 1);
      CoreResult p1 = active_set_core(Qa, ca, Ga, ha, za, max_iter, false);
      phase_one_iterations = p1.iterations;
      const double t = p1.z(n);
      if (!p1.optimal || t > 1e-9 * h_scale) {
        throw QpError(QpError::Kind::kInfeasible,
                      "QP constraints are inconsistent (minimal violation " + std::to_string(t) + ")");
      }
      z0 = p1.z.head(n);
    }
  }

  CoreResult core = active_set_core(problem.Q, problem.c, G, problem.h, z0,
                                    std::max(1, max_iter - phase_one_iterations),
                                    options.record_objective);
  sol.z = core.z;
  sol.duals = VectorXd::Zero(m);
  for (std::size_t k = 0; k < core.working.size(); ++k) {
    sol.duals(core.working[k]) = std::max(0.0, core.mu(static_cast<Index>(k)));
  }
  sol.iterations = core.iterations + phase_one_iterations;
  sol.status = core.optimal ? QpStatus::kOptimal : QpStatus::kMaxIterations;
  sol.degenerate = core.degenerate;
  sol.objective = problem.objective(sol.z);
  sol.objective_trace = std::move(core.trace);
  sol.kkt_residual = kkt_residual(problem, sol.z, sol.duals);
  const double tol = options.certify_tol *
                     (1.0 + std::max(inf_norm(problem.c), inf_norm(problem.Q * sol.z)));
  sol.certified = core.optimal && sol.kkt_residual <= tol;
  return sol;
}

}  // namespace csvor
