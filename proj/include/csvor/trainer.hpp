#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

#include "csvor/data.hpp"
#include "csvor/losses.hpp"
#include "csvor/model.hpp"
#include "csvor/qp.hpp"

namespace csvor {

/// How the residual cap eps_g is chosen during training.
struct EpsPolicy {
  enum class Kind { kFixed, kQuantile };

  Kind kind = Kind::kQuantile;
  double value = std::numeric_limits<double>::infinity();  // kFixed only
  // kQuantile: during the first warmup_iters iterations the cap tracks the
  // (1 - fraction) order statistic of the residuals, never below floor.
  double fraction = 0.10;
  int warmup_iters = 5;
  double floor = 1.0;

  static EpsPolicy fixed(double eps) {
    EpsPolicy e;
    e.kind = Kind::kFixed;
    e.value = eps;
    return e;
  }
  static EpsPolicy quantile(double fraction = 0.10, int warmup_iters = 5, double floor = 1.0) {
    EpsPolicy e;
    e.kind = Kind::kQuantile;
    e.fraction = fraction;
    e.warmup_iters = warmup_iters;
    e.floor = floor;
    return e;
  }
};

struct HyperParams {
  double gamma = 1.0;
  double p = 2.0;
  EpsPolicy eps;
  double delta = 1e-12;
  int max_iters = 50;
  double rel_tol = 1e-6;
  CapScale cap_scale = CapScale::kG;

  /// Throws InvalidArgument when any field is out of range.
  void validate() const;

  /// Fixed cap converted to the squared-residual scale.
  double fixed_eps_g() const;
};

struct TrainState {
  Eigen::VectorXd d_weights;      // diagonal of D after the last update
  std::vector<SlackPair> slack;   // columns of M after the last update
  Eigen::VectorXd g;              // squared residuals at the final iterate
  double eps_g = std::numeric_limits<double>::infinity();
  std::vector<double> objective_trace;
  int iteration = 0;
  bool converged = false;
  bool degenerate = false;        // every sample was capped
  int uncertified_solves = 0;

  // Weights of the solve that produced the final (w, b). Together with
  // `slack` they define the surrogate that (w, b) minimizes.
  Eigen::VectorXd last_solve_weights;
};

/// Everything one iteration saw, handed to an optional observer.
struct IterationSnapshot {
  int iteration;
  const Eigen::VectorXd& solve_weights;
  const LinearOrdinal& model;
  const QpSolution& qp;
  const std::vector<SlackPair>& slack;  // optimal for (w, b); the solve's M
  const Eigen::VectorXd& g;
  double eps_g;
  const Eigen::VectorXd& weights;
  double objective;
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

/// d_i = (p/2)(g_i + delta)^{(p-2)/2} when g_i <= eps_g, else 0.
Eigen::VectorXd update_weights_d(const Eigen::VectorXd& g, double p, double eps_g, double delta);

inline SlackPair update_slack_m(double score, int label, const Eigen::VectorXd& thresholds,
                                int num_classes) {
  return optimal_slack(score, label, thresholds, num_classes);
}

/// New cap after the residuals of `iteration` (1-based) are known.
/// `current` is the cap in force before this call (+inf before the first).
/// During warmup the cap is min(current, max(floor, order statistic)), so it
/// never grows; afterwards it is frozen.
double epsilon_update(const Eigen::VectorXd& g, const EpsPolicy& policy, int iteration,
                      double current);

/// The weighted least-squares problem in z = (w; b) for fixed D and M, as a
/// QP with the threshold-order constraints b_k <= b_{k+1}.
QpProblem assemble_wb_qp(const Dataset& ds, const Eigen::VectorXd& weights,
                         const std::vector<SlackPair>& slack, double gamma);

struct WbResult {
  LinearOrdinal model;
  QpSolution qp;            // the last QP solved
  bool degenerate = false;  // all weights were zero; model is the previous one
  int newton_steps = 0;     // solve_wbm only
};

/// Joint minimizer of the surrogate over (w, b) with D and M fixed.
WbResult solve_wb(const Dataset& ds, const Eigen::VectorXd& weights,
                  const std::vector<SlackPair>& slack, double gamma,
                  const LinearOrdinal* previous = nullptr);

/// Minimizer of the surrogate over (w, b, M >= 0) with D fixed, i.e. of
/// sum_i d_i (lower_i^2 + upper_i^2) + gamma |w|^2 under the threshold order.
/// Finite Newton method: each step solves the QP restricted to the currently
/// violated margins, followed by an exact line search.
WbResult solve_wbm(const Dataset& ds, const Eigen::VectorXd& weights, double gamma,
                   const LinearOrdinal* previous = nullptr);

/// sum_i d_i (lower_i^2 + upper_i^2) + gamma |w|^2.
double weighted_squared_hinge(const LinearOrdinal& model, const Dataset& ds,
                              const Eigen::VectorXd& weights, double gamma);

struct TrainResult {
  ModelParams model;
  TrainState state;
};

/// Re-weighted alternating minimization of the capped objective.
TrainResult train_csvor(const Dataset& ds, const HyperParams& hp,
                        const IterationObserver& observer = {});

struct OutlierEntry {
  std::size_t index;
  double g;
  double d;
  bool flagged;  // d == 0, equivalently g > eps_g
};

std::vector<OutlierEntry> outlier_report(const TrainState& state);

}  // namespace csvor
