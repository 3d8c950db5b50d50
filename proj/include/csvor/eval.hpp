#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csvor/data.hpp"
#include "csvor/model.hpp"
#include "csvor/trainer.hpp"

namespace csvor {

/// Fraction of positions where the labels differ.
double mze(const std::vector<int>& truth, const std::vector<int>& predicted);

struct Grid {
  std::vector<double> gammas;
  std::vector<double> ps;  // ignored for SVOREX

  /// gamma in {1e-3, ..., 1e3}, p in {0.5, 0.7, 1, 1.5, 1.7, 2}.
  static Grid standard();
};

/// Trains one model on `train`. With `standardize`, a z-score map is fitted
/// on `train` and stored in the model. For SVOREX only gamma is used.
ModelParams fit_model(const Dataset& train, Method method, double gamma, double p,
                      const HyperParams& base, bool standardize);

/// Fold index (0..folds-1) for every sample; classes are dealt round-robin
/// after a seeded shuffle so each fold gets a near-equal share of each class.
std::vector<int> stratified_folds(const Dataset& ds, int folds, std::uint64_t seed);

struct CvSettings {
  int folds = 5;
  std::uint64_t seed = 0;
  HyperParams base;  // everything except gamma and p
  bool standardize = true;
};

struct CvPoint {
  double gamma;
  double p;
  double mean_mze;
  int folds_ok;
};

struct CvResult {
  double gamma = 0.0;
  double p = 0.0;
  double mean_mze = 0.0;
  int folds_used = 0;
  std::vector<CvPoint> table;  // grid order
};

/// Picks the grid point with the lowest mean validation MZE. Ties go to the
/// larger gamma, then the smaller p, then the earlier grid point.
CvResult cv_grid_search(const Dataset& train, Method method, const Grid& grid,
                        const CvSettings& settings);

struct NoiseSpec {
  enum class Kind { kNone, kLabel, kFeature };
  Kind kind = Kind::kNone;
  double rate = 0.0;

  /// "none", "label:<rate>" or "feature:<rate>".
  static NoiseSpec parse(const std::string& text);
  std::string to_string() const;
};

struct BenchmarkConfig {
  std::string dataset_id = "dataset";
  std::vector<Method> methods{Method::kCsvor, Method::kSvorex};
  std::vector<NoiseSpec> noises{NoiseSpec{}};
  SplitSpec split;
  Grid grid = Grid::standard();
  int folds = 5;
  HyperParams base;
  bool standardize = true;
  bool cv_on_clean = false;
  double feature_share = 0.5;
  int jobs = 1;
};

struct CellResult {
  int repeat = 0;
  bool failed = false;
  std::string error;
  double mze = 0.0;
  double gamma = 0.0;
  double p = 0.0;
};

struct BenchmarkResult {
  std::string dataset_id;
  Method method = Method::kCsvor;
  NoiseSpec noise;
  std::vector<CellResult> cells;  // one per repeat, repeat order
  std::vector<double> mzes;       // successful cells, repeat order
  double mean = 0.0;
  double std = 0.0;               // sample standard deviation

  int failed_cells() const;
};

/// For every noise setting and repeat: split, corrupt the training side only,
/// select hyperparameters by CV, train, and score the untouched test side.
/// Feature noise uses min-max scaling fitted on the clean training side;
/// otherwise a z-score map is fitted on the training side when standardize.
std::vector<BenchmarkResult> run_benchmark(const Dataset& ds, const BenchmarkConfig& config);

/// Sample mean and standard deviation (n - 1 denominator; 0 when n < 2).
void summarize(const std::vector<double>& values, double& mean, double& std);

/// Average rank per method (rows) across datasets (columns); 1 is best and
/// tied entries share the mean of their ranks.
std::vector<double> mean_ranks(const std::vector<std::vector<double>>& mze_by_method);

std::string benchmark_json(const std::vector<BenchmarkResult>& results);
std::string benchmark_csv(const std::vector<BenchmarkResult>& results);

}  // namespace csvor
