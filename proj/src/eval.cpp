#include "csvor/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "csvor/common.hpp"
#include "csvor/rng.hpp"
#include "csvor/svorex.hpp"
#include "json.hpp"

namespace csvor {

double mze(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw InvalidArgument("mze: label vectors differ in length");
  if (truth.empty()) throw InvalidArgument("mze: no labels");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += truth[i] != predicted[i];
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

Grid Grid::standard() {
  return {{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}, {0.5, 0.7, 1.0, 1.5, 1.7, 2.0}};
}

ModelParams fit_model(const Dataset& train, Method method, double gamma, double p,
                      const HyperParams& base, bool standardize) {
  std::optional<Standardizer> st;
  Dataset work;
  if (standardize) {
    st = Standardizer::fit(train.features);
    work = st->apply(train);
  }
  const Dataset& data = standardize ? work : train;
  ModelParams model;
  if (method == Method::kCsvor) {
    HyperParams hp = base;
    hp.gamma = gamma;
    hp.p = p;
    model = train_csvor(data, hp).model;
  } else {
    model = train_svorex(data, gamma).model;
  }
  model.standardizer = std::move(st);
  return model;
}

std::vector<int> stratified_folds(const Dataset& ds, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("need at least two folds");
  std::vector<int> fold(ds.size(), 0);
  std::size_t offset = 0;
  for (int k = 1; k <= ds.num_classes; ++k) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == k) rows.push_back(i);
    }
    Rng rng(derive_seed(seed, {0xf01dULL, static_cast<std::uint64_t>(k)}));
    rng.shuffle(rows);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      fold[rows[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(folds));
    }
    offset += rows.size();
  }
  return fold;
}

namespace {

std::vector<std::pair<double, double>> grid_points(Method method, const Grid& grid) {
  if (grid.gammas.empty()) throw InvalidArgument("gamma grid is empty");
  std::vector<std::pair<double, double>> pts;
  if (method == Method::kSvorex) {
    for (double g : grid.gammas) pts.emplace_back(g, 0.0);
  } else {
    if (grid.ps.empty()) throw InvalidArgument("p grid is empty");
    for (double g : grid.gammas)
      for (double p : grid.ps) pts.emplace_back(g, p);
  }
  return pts;
}

}  // namespace

CvResult cv_grid_search(const Dataset& train, Method method, const Grid& grid,
                        const CvSettings& settings) {
  train.validate_for_training();
  std::size_t smallest = train.size();
  for (std::size_t c : train.class_counts()) {
    if (c > 0) smallest = std::min(smallest, c);
  }
  int folds = settings.folds;
  if (folds < 2) throw InvalidArgument("need at least two folds");
  if (smallest < static_cast<std::size_t>(folds)) {
    folds = std::max(2, static_cast<int>(smallest));
    warn("smallest class has " + std::to_string(smallest) + " samples; using " +
         std::to_string(folds) + " folds");
  }
  const std::vector<int> fold = stratified_folds(train, folds, settings.seed);
  std::vector<Dataset> fit_parts, val_parts;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> fit_rows, val_rows;
    for (std::size_t i = 0; i < train.size(); ++i) (fold[i] == f ? val_rows : fit_rows).push_back(i);
    fit_parts.push_back(train.subset(fit_rows));
    val_parts.push_back(train.subset(val_rows));
  }

  CvResult out;
  out.folds_used = folds;
  bool have_best = false;
  for (const auto& [gamma, p] : grid_points(method, grid)) {
    double sum = 0.0;
    int ok = 0;
    for (int f = 0; f < folds; ++f) {
      const Dataset& val = val_parts[static_cast<std::size_t>(f)];
      if (val.size() == 0) continue;
      try {
        const ModelParams m = fit_model(fit_parts[static_cast<std::size_t>(f)], method, gamma, p,
                                        settings.base, settings.standardize);
        sum += mze(val.labels, predict(m, val.features));
        ++ok;
      } catch (const DataError&) {
      } catch (const NumericalError&) {
      }
    }
    const double mean = ok > 0 ? sum / ok : std::numeric_limits<double>::infinity();
    out.table.push_back({gamma, p, mean, ok});
    if (ok == 0) continue;
    const bool better = !have_best || mean < out.mean_mze ||
                        (mean == out.mean_mze &&
                         (gamma > out.gamma || (gamma == out.gamma && p < out.p)));
    if (better) {
      out.gamma = gamma;
      out.p = p;
      out.mean_mze = mean;
      have_best = true;
    }
  }
  if (!have_best) throw DataError("cross-validation failed: every fold was degenerate");
  return out;
}

NoiseSpec NoiseSpec::parse(const std::string& text) {
  if (text == "none") return {};
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("noise must be none, label:<rate> or feature:<rate>, got '" + text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  NoiseSpec n;
  if (kind == "label") {
    n.kind = Kind::kLabel;
  } else if (kind == "feature") {
    n.kind = Kind::kFeature;
  } else {
    throw InvalidArgument("unknown noise kind '" + kind + "'");
  }
  std::size_t used = 0;
  try {
    n.rate = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size() || !(n.rate >= 0.0 && n.rate <= 1.0)) {
    throw InvalidArgument("noise rate must be a number in [0, 1], got '" + value + "'");
  }
  return n;
}

std::string NoiseSpec::to_string() const {
  if (kind == Kind::kNone) return "none";
  char buf[64];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, rate);
    if (std::strtod(buf, nullptr) == rate) break;
  }
  return std::string(kind == Kind::kLabel ? "label:" : "feature:") + buf;
}

int BenchmarkResult::failed_cells() const {
  return static_cast<int>(std::count_if(cells.begin(), cells.end(),
                                        [](const CellResult& c) { return c.failed; }));
}

void summarize(const std::vector<double>& values, double& mean, double& std) {
  mean = 0.0;
  std = 0.0;
  if (values.empty()) return;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  std = std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

std::uint64_t double_bits(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof u);
  return u;
}

CellResult run_cell(const Dataset& ds, const BenchmarkConfig& cfg, Method method,
                    const NoiseSpec& noise, int repeat) {
  CellResult cell;
  cell.repeat = repeat;
  const std::uint64_t key = derive_seed(
      cfg.split.seed, {0xbe7cULL, static_cast<std::uint64_t>(noise.kind), double_bits(noise.rate),
                       static_cast<std::uint64_t>(repeat)});
  try {
    const Split split = stratified_split(ds, cfg.split, repeat);
    Dataset clean = split.train;
    Dataset test = split.test;
    bool standardize = cfg.standardize;
    Dataset noisy;
    if (noise.kind == NoiseSpec::Kind::kFeature) {
      const MinMaxScaler scaler = MinMaxScaler::fit(clean.features);
      clean = scaler.apply(clean);
      test = scaler.apply(test);
      noisy = corrupt_features(clean, noise.rate, cfg.feature_share, derive_seed(key, {1})).data;
      standardize = false;
    } else if (noise.kind == NoiseSpec::Kind::kLabel) {
      noisy = inject_label_noise(clean, noise.rate, derive_seed(key, {1})).data;
    } else {
      noisy = clean;
    }
    CvSettings cv;
    cv.folds = cfg.folds;
    cv.seed = derive_seed(key, {2});
    cv.base = cfg.base;
    cv.standardize = standardize;
    const CvResult best = cv_grid_search(cfg.cv_on_clean ? clean : noisy, method, cfg.grid, cv);
    const ModelParams model = fit_model(noisy, method, best.gamma, best.p, cfg.base, standardize);
    cell.mze = mze(test.labels, predict(model, test.features));
    cell.gamma = best.gamma;
    cell.p = best.p;
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

std::vector<BenchmarkResult> run_benchmark(const Dataset& ds, const BenchmarkConfig& config) {
  ds.validate_for_training();
  config.split.validate();
  config.base.validate();
  if (config.methods.empty()) throw InvalidArgument("no methods to benchmark");
  if (config.noises.empty()) throw InvalidArgument("no noise settings to benchmark");
  if (config.jobs < 1) throw InvalidArgument("jobs must be at least 1");

  struct Job {
    std::size_t result;
    int repeat;
  };
  std::vector<BenchmarkResult> results;
  std::vector<Job> jobs;
  for (const NoiseSpec& noise : config.noises) {
    for (Method method : config.methods) {
      BenchmarkResult r;
      r.dataset_id = config.dataset_id;
      r.method = method;
      r.noise = noise;
      r.cells.resize(static_cast<std::size_t>(config.split.num_repeats));
      results.push_back(std::move(r));
      for (int rep = 0; rep < config.split.num_repeats; ++rep) jobs.push_back({results.size() - 1, rep});
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      BenchmarkResult& r = results[jobs[j].result];
      r.cells[static_cast<std::size_t>(jobs[j].repeat)] =
          run_cell(ds, config, r.method, r.noise, jobs[j].repeat);
    }
  };
  const int threads = std::min<int>(config.jobs, static_cast<int>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (BenchmarkResult& r : results) {
    for (const CellResult& c : r.cells) {
      if (!c.failed) r.mzes.push_back(c.mze);
    }
    summarize(r.mzes, r.mean, r.std);
  }
  return results;
}

std::vector<double> mean_ranks(const std::vector<std::vector<double>>& mze_by_method) {
  if (mze_by_method.empty()) throw InvalidArgument("mean_ranks: no methods");
  const std::size_t datasets = mze_by_method.front().size();
  if (datasets == 0) throw InvalidArgument("mean_ranks: no datasets");
  for (const auto& row : mze_by_method) {
    if (row.size() != datasets) throw InvalidArgument("mean_ranks: ragged result matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw InvalidArgument("mean_ranks: missing or non-finite entry");
    }
  }
  const std::size_t methods = mze_by_method.size();
  std::vector<double> ranks(methods, 0.0);
  std::vector<std::size_t> order(methods);
  for (std::size_t d = 0; d < datasets; ++d) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mze_by_method[a][d] < mze_by_method[b][d];
    });
    for (std::size_t i = 0; i < methods;) {
      std::size_t j = i;
      while (j + 1 < methods && mze_by_method[order[j + 1]][d] == mze_by_method[order[i]][d]) ++j;
      const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) ranks[order[k]] += shared;
      i = j + 1;
    }
  }
  for (double& r : ranks) r /= static_cast<double>(datasets);
  return ranks;
}

std::string benchmark_json(const std::vector<BenchmarkResult>& results) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema_version"] = 1;
  ordered_json arr = ordered_json::array();
  for (const BenchmarkResult& r : results) {
    ordered_json item;
    item["dataset"] = r.dataset_id;
    item["method"] = to_string(r.method);
    item["noise"] = {{"kind", r.noise.kind == NoiseSpec::Kind::kNone    ? "none"
                              : r.noise.kind == NoiseSpec::Kind::kLabel ? "label"
                                                                        : "feature"},
                     {"rate", r.noise.rate}};
    item["mze"] = r.mzes;
    item["mean"] = r.mean;
    item["std"] = r.std;
    ordered_json cells = ordered_json::array();
    for (const CellResult& c : r.cells) {
      ordered_json cell;
      cell["repeat"] = c.repeat;
      if (c.failed) {
        cell["status"] = "failed";
        cell["error"] = c.error;
      } else {
        cell["status"] = "ok";
        cell["mze"] = c.mze;
        cell["gamma"] = c.gamma;
        if (r.method == Method::kCsvor) {
          cell["p"] = c.p;
        } else {
          cell["p"] = nullptr;
        }
      }
      cells.push_back(std::move(cell));
    }
    item["splits"] = std::move(cells);
    arr.push_back(std::move(item));
  }
  doc["results"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string benchmark_csv(const std::vector<BenchmarkResult>& results) {
  std::ostringstream os;
  os << "dataset,method,noise_kind,noise_rate,repeat,status,mze,gamma,p\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const BenchmarkResult& r : results) {
    const std::string kind = r.noise.kind == NoiseSpec::Kind::kNone    ? "none"
                             : r.noise.kind == NoiseSpec::Kind::kLabel ? "label"
                                                                       : "feature";
    for (const CellResult& c : r.cells) {
      os << r.dataset_id << ',' << to_string(r.method) << ',' << kind << ',' << num(r.noise.rate)
         << ',' << c.repeat << ',' << (c.failed ? "failed" : "ok") << ',';
      if (!c.failed) {
        os << num(c.mze) << ',' << num(c.gamma) << ',';
        if (r.method == Method::kCsvor) os << num(c.p);
      } else {
        os << ",,";
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace csvor
