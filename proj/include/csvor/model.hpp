#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "csvor/data.hpp"
#include "csvor/losses.hpp"

namespace csvor {

enum class Method { kCsvor, kSvorex };

/// Whether a fixed cap is given on the squared-residual scale (g <= eps) or
/// on the loss scale (g^{p/2} <= eps).
enum class CapScale { kG, kLoss };

std::string to_string(Method m);
Method parse_method(const std::string& s);
std::string to_string(CapScale s);
CapScale parse_cap_scale(const std::string& s);

/// Trained threshold model: score w'x, thresholds b_1 <= ... <= b_{K-1}.
struct ModelParams {
  Eigen::VectorXd w;
  Eigen::VectorXd b;
  int num_classes = 0;
  std::optional<Standardizer> standardizer;

  Method method = Method::kCsvor;
  double gamma = 0.0;
  double p = 2.0;
  double eps_g = std::numeric_limits<double>::infinity();
  CapScale cap_scale = CapScale::kG;

  LinearOrdinal linear() const { return {w, b}; }

  /// Dimensions agree and thresholds are nondecreasing within 1e-9.
  void validate() const;
};

/// Number of thresholds at or below the score, plus one. A score exactly on
/// a threshold belongs to the class above it.
int predict_from_score(double score, const Eigen::VectorXd& thresholds);

/// Applies the model's standardizer (if any) before scoring.
int predict(const ModelParams& model, const Eigen::VectorXd& x);
std::vector<int> predict(const ModelParams& model, const Eigen::MatrixXd& features);

}  // namespace csvor
