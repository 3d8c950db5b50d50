#pragma once

#include <Eigen/Dense>

#include "csvor/data.hpp"
#include "csvor/losses.hpp"
#include "csvor/model.hpp"
#include "csvor/qp.hpp"

namespace csvor {

struct SvorexResult {
  ModelParams model;
  Eigen::VectorXd xi_lower;  // zero for label 1
  Eigen::VectorXd xi_upper;  // zero for label K
  QpSolution qp;
  double objective = 0.0;
};

/// sum_i (lower_i + upper_i) + gamma |w|^2 with hinges from hinge_components.
double svorex_objective(const LinearOrdinal& model, const Dataset& ds, double gamma);

/// Primal QP in (w, b, xi, xi*): minimize sum(xi + xi*) + gamma |w|^2 subject
/// to the explicit-threshold margin constraints and b_k <= b_{k+1}.
QpProblem assemble_svorex_qp(const Dataset& ds, double gamma);

/// Throws NumericalError when the solver cannot certify the solution.
SvorexResult train_svorex(const Dataset& ds, double gamma);

}  // namespace csvor
