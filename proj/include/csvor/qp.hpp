#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "csvor/common.hpp"

namespace csvor {

/// Dense convex quadratic program
///
///   minimize    0.5 z'Qz + c'z
///   subject to  Gz <= h
///
/// Q must be symmetric positive semidefinite. Singular Q is allowed as long
/// as the objective is bounded below on the feasible set.
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd G;  // m x n; m may be zero
  Eigen::VectorXd h;

  Eigen::Index num_variables() const { return c.size(); }
  Eigen::Index num_constraints() const { return h.size(); }
  double objective(const Eigen::VectorXd& z) const;

  /// Dimension, symmetry (1e-12 relative) and semidefiniteness
  /// (eigenvalues >= -1e-10 relative) checks. Throws QpError.
  void validate() const;
};

enum class QpStatus { kOptimal, kMaxIterations };

struct QpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd duals;  // one per constraint, >= 0
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  QpStatus status = QpStatus::kOptimal;
  /// Optimal and KKT conditions verified to the certification tolerance.
  bool certified = false;
  /// A zero-curvature direction was followed at least once (singular Q).
  bool degenerate = false;
  /// Objective after every primal step, when QpOptions::record_objective.
  std::vector<double> objective_trace;
};

struct QpOptions {
  int max_iterations = 0;  // 0 selects 50 * (n + m) + 1000
  double certify_tol = 1e-8;
  bool record_objective = false;
};

class QpError : public NumericalError {
 public:
  enum class Kind { kInfeasible, kUnbounded, kNotConvex, kBadInput };
  QpError(Kind kind, const std::string& what) : NumericalError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Primal active-set solve. The warm start need not be feasible; an
/// infeasible start triggers a phase-one linear program.
QpSolution solve_qp(const QpProblem& problem,
                    const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                    const QpOptions& options = {});

/// Largest of: stationarity |Qz + c + G'duals|_inf, primal infeasibility
/// max(Gz - h, 0), dual negativity max(-duals, 0), and complementarity
/// |duals_j (Gz - h)_j|.
double kkt_residual(const QpProblem& problem, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& duals);

}  // namespace csvor
