#pragma once

#include <Eigen/Dense>
#include <vector>

#include "csvor/data.hpp"

namespace csvor {

/// Which one-sided hinges exist for a label. The lowest class has no lower
/// threshold and the highest class has no upper one.
enum class HingeMask { kBoth, kUpperOnly, kLowerOnly };

HingeMask hinge_mask(int label, int num_classes);
inline bool has_lower(HingeMask m) { return m != HingeMask::kUpperOnly; }
inline bool has_upper(HingeMask m) { return m != HingeMask::kLowerOnly; }

/// Violations of the two margins around a sample's class interval
/// [b_{y-1} + 1, b_y - 1]. Inactive components are exactly zero.
struct HingePair {
  double lower = 0.0;  // how far the score falls below b_{y-1} + 1
  double upper = 0.0;  // how far the score exceeds b_y - 1
  HingeMask mask = HingeMask::kBoth;

  double squared_norm() const { return lower * lower + upper * upper; }
};

/// Slack column attached to one sample; inactive component fixed at zero.
struct SlackPair {
  double m_lower = 0.0;
  double m_upper = 0.0;
};

/// Thresholds are b_1..b_{K-1}, stored zero-based; the sentinels
/// b_0 = -inf and b_K = +inf are implied by the mask.
HingePair hinge_components(double score, int label, const Eigen::VectorXd& thresholds,
                           int num_classes);

/// min((|h|^2 + delta)^{p/2}, (eps_g + delta)^{p/2}). The cap is expressed
/// on the squared-residual scale, so eps_g = +inf disables it. delta = 0
/// gives the plain capped loss; the trainer passes its smoothing delta so the
/// value it tracks is the one its weight update linearizes.
double capped_lp_loss(const HingePair& h, double p, double eps_g, double delta = 0.0);

/// Squared residual of one sample for fixed slack:
///   r_lower = s - b_{y-1} - 1 - m_lower,  r_upper = s - b_y + 1 + m_upper,
/// summed over the active components.
double slack_residual_g(double score, int label, const Eigen::VectorXd& thresholds,
                        int num_classes, const SlackPair& m);

/// Minimizer of slack_residual_g over m >= 0 (componentwise positive parts).
SlackPair optimal_slack(double score, int label, const Eigen::VectorXd& thresholds,
                        int num_classes);

/// Linear model parameters consumed by the objectives.
struct LinearOrdinal {
  Eigen::VectorXd w;
  Eigen::VectorXd b;  // length K-1
};

/// sum_i capped_lp_loss(hinge_i) + gamma * |w|^2.
double capped_objective(const LinearOrdinal& model, const Dataset& ds, double gamma, double p,
                        double eps_g, double delta = 0.0);

/// sum_i d_i g_i(w, b, m_i) + gamma * |w|^2.
double surrogate_objective(const LinearOrdinal& model, const Dataset& ds,
                           const std::vector<SlackPair>& slack, const Eigen::VectorXd& weights,
                           double gamma);

}  // namespace csvor
