#include "csvor/model.hpp"

#include <cmath>

#include "csvor/common.hpp"

namespace csvor {

std::string to_string(Method m) { return m == Method::kCsvor ? "csvor" : "svorex"; }

Method parse_method(const std::string& s) {
  if (s == "csvor") return Method::kCsvor;
  if (s == "svorex") return Method::kSvorex;
  throw InvalidArgument("unknown method '" + s + "' (expected csvor or svorex)");
}

std::string to_string(CapScale s) { return s == CapScale::kG ? "g" : "loss"; }

CapScale parse_cap_scale(const std::string& s) {
  if (s == "g") return CapScale::kG;
  if (s == "loss") return CapScale::kLoss;
  throw InvalidArgument("unknown cap scale '" + s + "' (expected g or loss)");
}

void ModelParams::validate() const {
  if (num_classes < 2) throw InvalidArgument("model needs at least two classes");
  if (b.size() != num_classes - 1) throw InvalidArgument("model needs K-1 thresholds");
  if (!w.allFinite() || !b.allFinite()) throw InvalidArgument("model parameters must be finite");
  for (Eigen::Index k = 1; k < b.size(); ++k) {
    if (b(k) < b(k - 1) - 1e-9) throw InvalidArgument("thresholds must be nondecreasing");
  }
  if (standardizer) {
    if (standardizer->means.size() != w.size() || standardizer->scales.size() != w.size()) {
      throw InvalidArgument("standardizer dimension does not match w");
    }
  }
}

int predict_from_score(double score, const Eigen::VectorXd& thresholds) {
  int label = 1;
  for (Eigen::Index k = 0; k < thresholds.size(); ++k) {
    if (score - thresholds(k) >= 0.0) ++label;
  }
  return label;
}

int predict(const ModelParams& model, const Eigen::VectorXd& x) {
  if (x.size() != model.w.size()) {
    throw InvalidArgument("feature vector has " + std::to_string(x.size()) +
                          " entries, model expects " + std::to_string(model.w.size()));
  }
  const double s = model.standardizer ? model.standardizer->apply(x).dot(model.w) : x.dot(model.w);
  return predict_from_score(s, model.b);
}

std::vector<int> predict(const ModelParams& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.w.size()) {
    throw InvalidArgument("feature matrix has " + std::to_string(features.cols()) +
                          " columns, model expects " + std::to_string(model.w.size()));
  }
  const Eigen::VectorXd scores = model.standardizer
                                     ? Eigen::VectorXd(model.standardizer->apply(features) * model.w)
                                     : Eigen::VectorXd(features * model.w);
  std::vector<int> out(static_cast<std::size_t>(scores.size()));
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    out[static_cast<std::size_t>(i)] = predict_from_score(scores(i), model.b);
  }
  return out;
}

}  // namespace csvor
