#include "csvor/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "csvor/common.hpp"
#include "csvor/rng.hpp"

namespace csvor {

// --- Dataset -----------------------------------------------------------

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
  for (int y : labels) {
    if (y >= 1 && y <= num_classes) ++counts[static_cast<std::size_t>(y - 1)];
  }
  return counts;
}

int Dataset::distinct_classes() const {
  auto counts = class_counts();
  return static_cast<int>(std::count_if(counts.begin(), counts.end(),
                                        [](std::size_t c) { return c > 0; }));
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.num_classes = num_classes;
  out.feature_names = feature_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) =
        features.row(static_cast<Eigen::Index>(rows[r]));
    out.labels.push_back(labels[rows[r]]);
  }
  return out;
}

void Dataset::validate() const {
  if (num_classes < 2) throw DataError("dataset needs at least 2 ordinal classes");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("feature rows and label count differ");
  }
  if (!feature_names.empty() && feature_names.size() != dim()) {
    throw DataError("feature name count does not match feature columns");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > num_classes) {
      throw DataError("label " + std::to_string(labels[i]) + " of sample " + std::to_string(i) +
                      " outside 1.." + std::to_string(num_classes));
    }
  }
  if (!features.allFinite()) throw DataError("features contain non-finite values");
}

void Dataset::validate_for_training() const {
  validate();
  if (labels.empty()) throw DataError("training set is empty");
  if (distinct_classes() < 2) throw DataError("training set needs samples from two classes");
}

// --- CSV ---------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos
                                                                ? std::string::npos
                                                                : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  if (*first == '+') ++first;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<long> parse_integer(const std::string& s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  auto d = parse_double(s);
  if (d && std::isfinite(*d) && std::floor(*d) == *d && std::fabs(*d) < 1e9) {
    return static_cast<long>(*d);
  }
  return std::nullopt;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LoadedCsv parse_csv(const std::string& text, const CsvOptions& options) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      rows.emplace_back(line_no, split_fields(line));
    }
  }
  if (rows.empty()) throw DataError("empty CSV input");

  const std::size_t arity = rows.front().second.size();
  if (arity < 2) throw DataError("CSV needs at least one feature column and a label column");
  const std::size_t label_col = options.label_column.value_or(arity - 1);
  if (label_col >= arity) throw DataError("label column index out of range");

  bool has_header = false;
  for (const auto& f : rows.front().second) {
    if (!parse_double(f)) {
      has_header = true;
      break;
    }
  }
  std::vector<std::string> names;
  if (has_header) {
    for (std::size_t c = 0; c < arity; ++c) {
      if (c != label_col) names.push_back(rows.front().second[c]);
    }
    rows.erase(rows.begin());
  }
  if (rows.empty()) throw DataError("CSV has a header but no data rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(arity - 1);
  Eigen::MatrixXd x(n, d);
  std::vector<int> labels;
  Eigen::VectorXd targets(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& [line_no, fields] = rows[static_cast<std::size_t>(r)];
    const std::string where = "row " + std::to_string(line_no);
    if (fields.size() != arity) {
      throw DataError(where + ": expected " + std::to_string(arity) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_col) continue;
      auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v)) {
        throw DataError(where + ": feature '" + fields[c] + "' is not a finite number");
      }
      x(r, col++) = *v;
    }
    const std::string& lab = fields[label_col];
    if (options.mode == LabelMode::kOrdinal) {
      auto y = parse_integer(lab);
      if (!y) throw DataError(where + ": ordinal label '" + lab + "' is not an integer");
      if (*y < 1) throw DataError(where + ": ordinal label " + lab + " must be >= 1");
      labels.push_back(static_cast<int>(*y));
    } else {
      auto t = parse_double(lab);
      if (!t || !std::isfinite(*t)) {
        throw DataError(where + ": target '" + lab + "' is not a finite number");
      }
      targets(r) = *t;
    }
  }

  if (options.mode == LabelMode::kRegression) {
    return RegressionData{std::move(x), std::move(targets), std::move(names)};
  }
  Dataset ds;
  ds.features = std::move(x);
  ds.num_classes = *std::max_element(labels.begin(), labels.end());
  ds.labels = std::move(labels);
  ds.feature_names = std::move(names);
  if (ds.num_classes < 2) throw DataError("ordinal labels must span at least 2 classes");
  ds.validate();
  return ds;
}

LoadedCsv load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), options);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

Dataset load_ordinal_csv(const std::string& path, const CsvOptions& options) {
  CsvOptions o = options;
  o.mode = LabelMode::kOrdinal;
  return std::get<Dataset>(load_csv(path, o));
}

std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  for (std::size_t c = 0; c < ds.dim(); ++c) {
    out << (ds.feature_names.empty() ? "x" + std::to_string(c + 1) : ds.feature_names[c]) << ',';
  }
  out << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t c = 0; c < ds.dim(); ++c) {
      out << format_double(ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)))
          << ',';
    }
    out << ds.labels[i] << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << to_csv(ds);
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<int> equal_frequency_bins(const Eigen::VectorXd& targets, int num_classes) {
  const auto n = static_cast<std::size_t>(targets.size());
  if (num_classes < 2) throw InvalidArgument("equal_frequency_bins: K must be >= 2");
  if (static_cast<std::size_t>(num_classes) > n) {
    throw InvalidArgument("equal_frequency_bins: K=" + std::to_string(num_classes) +
                          " exceeds N=" + std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return targets(static_cast<Eigen::Index>(a)) < targets(static_cast<Eigen::Index>(b));
  });
  std::vector<int> labels(n);
  for (std::size_t rank = 0; rank < n; ++rank) {
    labels[order[rank]] = static_cast<int>(rank * static_cast<std::size_t>(num_classes) / n) + 1;
  }
  return labels;
}

// --- preprocessing -----------------------------------------------------

Standardizer Standardizer::fit(const Eigen::MatrixXd& features) {
  if (features.rows() == 0) throw InvalidArgument("Standardizer::fit on empty matrix");
  Standardizer s;
  s.means = features.colwise().mean().transpose();
  s.scales.resize(features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    const double var = (features.col(c).array() - s.means(c)).square().mean();
    const double sd = std::sqrt(var);
    s.scales(c) = sd > 1e-12 * std::max(1.0, std::fabs(s.means(c))) ? sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& features) const {
  if (features.cols() != means.size()) throw InvalidArgument("Standardizer: dimension mismatch");
  Eigen::MatrixXd out = features.rowwise() - means.transpose();
  out.array().rowwise() /= scales.transpose().array();
  return out;
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != means.size()) throw InvalidArgument("Standardizer: dimension mismatch");
  return ((x - means).array() / scales.array()).matrix();
}

Dataset Standardizer::apply(const Dataset& ds) const {
  Dataset out = ds;
  out.features = apply(ds.features);
  return out;
}

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd& features) {
  if (features.rows() == 0) throw InvalidArgument("MinMaxScaler::fit on empty matrix");
  MinMaxScaler s;
  s.mins = features.colwise().minCoeff().transpose();
  s.ranges = features.colwise().maxCoeff().transpose() - s.mins;
  for (Eigen::Index c = 0; c < s.ranges.size(); ++c) {
    if (s.ranges(c) <= 0.0) {
      warn("min-max scaling: feature " + std::to_string(c) + " is constant, mapped to 0");
      s.ranges(c) = 0.0;
    }
  }
  return s;
}

Eigen::MatrixXd MinMaxScaler::apply(const Eigen::MatrixXd& features) const {
  if (features.cols() != mins.size()) throw InvalidArgument("MinMaxScaler: dimension mismatch");
  Eigen::MatrixXd out(features.rows(), features.cols());
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    if (ranges(c) > 0.0) {
      out.col(c) = (features.col(c).array() - mins(c)) / ranges(c);
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

Dataset MinMaxScaler::apply(const Dataset& ds) const {
  Dataset out = ds;
  out.features = apply(ds.features);
  return out;
}

// --- splitting ---------------------------------------------------------

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train_fraction must lie in (0, 1)");
  }
  if (num_repeats < 1) throw InvalidArgument("num_repeats must be positive");
}

Split stratified_split(const Dataset& ds, const SplitSpec& spec, int repeat_index) {
  spec.validate();
  if (repeat_index < 0) throw InvalidArgument("repeat_index must be non-negative");
  Rng rng(derive_seed(spec.seed, {0x5b1175ULL, static_cast<std::uint64_t>(repeat_index)}));

  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(ds.num_classes));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[static_cast<std::size_t>(ds.labels[i] - 1)].push_back(i);
  }
  Split out;
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    auto& rows = by_class[k];
    if (rows.empty()) continue;
    rng.shuffle(rows);
    const std::size_t n = rows.size();
    std::size_t n_train;
    if (n == 1) {
      warn("stratified_split: class " + std::to_string(k + 1) +
           " has a single sample; placed in the training side");
      n_train = 1;
    } else {
      auto target = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
      n_train = std::clamp<std::size_t>(target, 1, n - 1);
    }
    out.train_rows.insert(out.train_rows.end(), rows.begin(), rows.begin() + static_cast<long>(n_train));
    out.test_rows.insert(out.test_rows.end(), rows.begin() + static_cast<long>(n_train), rows.end());
  }
  std::sort(out.train_rows.begin(), out.train_rows.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  out.train = ds.subset(out.train_rows);
  out.test = ds.subset(out.test_rows);
  return out;
}

// --- outlier injection -------------------------------------------------

namespace {

std::size_t corrupted_count(double fraction, std::size_t n) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw InvalidArgument("corruption fraction must lie in [0, 1]");
  }
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
}

}  // namespace

Corrupted inject_label_noise(const Dataset& ds, double fraction, std::uint64_t seed) {
  const std::size_t count = corrupted_count(fraction, ds.size());
  if (ds.num_classes < 2) throw InvalidArgument("label noise needs K >= 2");
  Rng rng(derive_seed(seed, {0x1abe1ULL}));
  Corrupted out{ds, rng.sample_without_replacement(ds.size(), count)};
  for (std::size_t i : out.corrupted_rows) {
    const int y = ds.labels[i];
    int r = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(ds.num_classes - 1))) + 1;
    if (r >= y) ++r;
    out.data.labels[i] = r;
  }
  std::sort(out.corrupted_rows.begin(), out.corrupted_rows.end());
  return out;
}

Corrupted corrupt_features(const Dataset& ds, double fraction, double feature_share,
                           std::uint64_t seed) {
  const std::size_t count = corrupted_count(fraction, ds.size());
  if (!(feature_share >= 0.0 && feature_share <= 1.0)) {
    throw InvalidArgument("feature_share must lie in [0, 1]");
  }
  const std::size_t per_point =
      static_cast<std::size_t>(std::llround(feature_share * static_cast<double>(ds.dim())));
  Rng rng(derive_seed(seed, {0xfea7ULL}));
  Corrupted out{ds, rng.sample_without_replacement(ds.size(), count)};
  for (std::size_t i : out.corrupted_rows) {
    for (std::size_t c : rng.sample_without_replacement(ds.dim(), per_point)) {
      out.data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = -1.0;
    }
  }
  std::sort(out.corrupted_rows.begin(), out.corrupted_rows.end());
  return out;
}

Corrupted inject_feature_corruption(const Dataset& ds, double fraction, double feature_share,
                                    std::uint64_t seed) {
  corrupted_count(fraction, ds.size());
  const Dataset normalized = MinMaxScaler::fit(ds.features).apply(ds);
  return corrupt_features(normalized, fraction, feature_share, seed);
}

// --- synthetic data ----------------------------------------------------

SynthConfig SynthConfig::three_clusters(std::size_t per_class, double spacing) {
  SynthConfig cfg;
  for (int k = 0; k < 3; ++k) {
    GaussianCluster c;
    c.mean = Eigen::Vector2d(spacing * k, 0.0);
    c.covariance = Eigen::Matrix2d::Identity();
    c.count = per_class;
    cfg.clusters.push_back(std::move(c));
  }
  return cfg;
}

Dataset synth_gaussian_ordinal(const SynthConfig& config, std::uint64_t seed) {
  if (config.clusters.size() < 2) throw InvalidArgument("synthetic data needs >= 2 clusters");
  const Eigen::Index d = config.clusters.front().mean.size();
  std::vector<Eigen::MatrixXd> factors;
  std::size_t n = config.outliers.size();
  for (std::size_t k = 0; k < config.clusters.size(); ++k) {
    const auto& c = config.clusters[k];
    if (c.mean.size() != d || c.covariance.rows() != d || c.covariance.cols() != d) {
      throw InvalidArgument("cluster " + std::to_string(k + 1) + " has inconsistent dimensions");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(c.covariance);
    if (llt.info() != Eigen::Success || !c.covariance.isApprox(c.covariance.transpose())) {
      throw InvalidArgument("covariance of cluster " + std::to_string(k + 1) +
                            " is not positive definite");
    }
    factors.push_back(llt.matrixL());
    n += c.count;
  }
  Dataset ds;
  ds.num_classes = static_cast<int>(config.clusters.size());
  ds.features.resize(static_cast<Eigen::Index>(n), d);
  ds.labels.reserve(n);
  Rng rng(derive_seed(seed, {0x5e7dULL}));
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < config.clusters.size(); ++k) {
    const auto& c = config.clusters[k];
    for (std::size_t j = 0; j < c.count; ++j) {
      Eigen::VectorXd z(d);
      for (Eigen::Index t = 0; t < d; ++t) z(t) = rng.normal();
      ds.features.row(row++) = (c.mean + factors[k] * z).transpose();
      ds.labels.push_back(static_cast<int>(k) + 1);
    }
  }
  for (const auto& o : config.outliers) {
    if (o.x.size() != d) throw InvalidArgument("outlier dimension mismatch");
    if (o.label < 1 || o.label > ds.num_classes) throw InvalidArgument("outlier label out of range");
    ds.features.row(row++) = o.x.transpose();
    ds.labels.push_back(o.label);
  }
  ds.validate();
  return ds;
}

std::vector<LabeledPoint> gaussian_outliers(std::size_t count, const Eigen::VectorXd& center,
                                            double spread, int label, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {0x0017ULL}));
  std::vector<LabeledPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::VectorXd x(center.size());
    for (Eigen::Index t = 0; t < x.size(); ++t) x(t) = center(t) + spread * rng.normal();
    out.push_back({std::move(x), label});
  }
  return out;
}

std::vector<LabeledPoint> flanking_outliers(std::size_t count, double spacing, double offset,
                                            std::uint64_t seed) {
  if (count % 4 != 0) throw InvalidArgument("flanking_outliers: count must be a multiple of 4");
  struct Group {
    double x;
    int label;
  };
  const double right = 2.0 * spacing + offset;
  const Group groups[] = {{right, 1}, {right, 2}, {-offset, 2}, {-offset, 3}};
  std::vector<LabeledPoint> out;
  out.reserve(count);
  std::uint64_t k = 0;
  for (const Group& g : groups) {
    Eigen::VectorXd center(2);
    center << g.x, 0.0;
    auto part = gaussian_outliers(count / 4, center, 1.0, g.label, derive_seed(seed, {k++}));
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace csvor
