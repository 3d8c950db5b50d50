#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace csvor {

/// Ordinal dataset: N samples, d features, labels in 1..K.
struct Dataset {
  Eigen::MatrixXd features;  // N x d, one sample per row
  std::vector<int> labels;   // length N, values in 1..num_classes
  int num_classes = 0;
  std::vector<std::string> feature_names;  // empty or length d

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

  /// Per-class sample counts, index k-1 holds class k.
  std::vector<std::size_t> class_counts() const;

  /// Number of classes with at least one sample.
  int distinct_classes() const;

  /// Rows selected by index, in the given order. Keeps num_classes.
  Dataset subset(const std::vector<std::size_t>& rows) const;

  /// Throws DataError on out-of-range labels, non-finite features,
  /// K < 2 or mismatched shapes.
  void validate() const;

  /// validate() plus the training requirement that two classes are present.
  void validate_for_training() const;
};

/// Features with a real-valued target, before discretization.
struct RegressionData {
  Eigen::MatrixXd features;
  Eigen::VectorXd targets;
  std::vector<std::string> feature_names;
};

enum class LabelMode { kOrdinal, kRegression };

struct CsvOptions {
  /// Zero-based label column; nullopt selects the last column.
  std::optional<std::size_t> label_column;
  LabelMode mode = LabelMode::kOrdinal;
};

using LoadedCsv = std::variant<Dataset, RegressionData>;

/// Comma-separated file, optional header (detected when the first row has a
/// non-numeric field). Row numbers in error messages are 1-based file lines.
LoadedCsv load_csv(const std::string& path, const CsvOptions& options = {});
Dataset load_ordinal_csv(const std::string& path, const CsvOptions& options = {});
LoadedCsv parse_csv(const std::string& text, const CsvOptions& options = {});

/// Writes features then label, with a header row. Doubles use 17
/// significant digits so a reload reproduces them exactly.
std::string to_csv(const Dataset& ds);
void write_csv(const Dataset& ds, const std::string& path);

/// Equal-frequency discretization into K ordinal labels. Ties are ordered by
/// original index, so bin sizes differ by at most one.
std::vector<int> equal_frequency_bins(const Eigen::VectorXd& targets, int num_classes);

// --- preprocessing -----------------------------------------------------

/// Per-feature z-score transform.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;  // all > 0; constant features get scale 1

  static Standardizer fit(const Eigen::MatrixXd& features);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Dataset apply(const Dataset& ds) const;
};

/// Per-feature min-max map onto [0, 1]. Constant features map to 0.
struct MinMaxScaler {
  Eigen::VectorXd mins;
  Eigen::VectorXd ranges;  // zero for constant features

  static MinMaxScaler fit(const Eigen::MatrixXd& features);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
  Dataset apply(const Dataset& ds) const;
};

// --- splitting ---------------------------------------------------------

struct SplitSpec {
  double train_fraction = 0.75;
  int num_repeats = 30;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;  // ascending
  std::vector<std::size_t> test_rows;   // ascending
};

/// Stratified random partition for one repeat; a pure function of
/// (ds, spec.train_fraction, spec.seed, repeat_index).
Split stratified_split(const Dataset& ds, const SplitSpec& spec, int repeat_index);

// --- outlier injection -------------------------------------------------

struct Corrupted {
  Dataset data;
  std::vector<std::size_t> corrupted_rows;  // ascending
};

/// Replaces round(fraction * N) labels, chosen uniformly without
/// replacement, by a uniformly drawn different label.
Corrupted inject_label_noise(const Dataset& ds, double fraction, std::uint64_t seed);

/// Min-max normalizes every feature to [0, 1], then sets round(feature_share
/// * d) distinct features of round(fraction * N) samples to -1.
Corrupted inject_feature_corruption(const Dataset& ds, double fraction, double feature_share,
                                    std::uint64_t seed);

/// The corruption step alone, for data that is already normalized.
Corrupted corrupt_features(const Dataset& ds, double fraction, double feature_share,
                           std::uint64_t seed);

// --- synthetic data ----------------------------------------------------

struct GaussianCluster {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::size_t count = 0;
};

struct LabeledPoint {
  Eigen::VectorXd x;
  int label = 1;
};

struct SynthConfig {
  std::vector<GaussianCluster> clusters;  // cluster k carries label k+1
  std::vector<LabeledPoint> outliers;     // appended verbatim

  /// Three collinear unit-covariance clusters at (0,0), (4,0), (8,0).
  static SynthConfig three_clusters(std::size_t per_class = 50, double spacing = 4.0);
};

Dataset synth_gaussian_ordinal(const SynthConfig& config, std::uint64_t seed);

/// Outlier generator: `count` points drawn around `center` with isotropic
/// standard deviation `spread`, all carrying `label`.
std::vector<LabeledPoint> gaussian_outliers(std::size_t count, const Eigen::VectorXd& center,
                                            double spread, int label, std::uint64_t seed);

/// Far outliers for the three-cluster layout: count/4 unit-spread points at
/// each of (2*spacing + offset, 0) with labels 1 and 2, and (-offset, 0) with
/// labels 2 and 3. Every group sits beyond an end cluster with a label that
/// contradicts it, and no single linear order fits all four groups.
std::vector<LabeledPoint> flanking_outliers(std::size_t count, double spacing, double offset,
                                            std::uint64_t seed);

}  // namespace csvor
