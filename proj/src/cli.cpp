#include "csvor/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "csvor/common.hpp"
#include "csvor/data.hpp"
#include "csvor/eval.hpp"
#include "csvor/model_io.hpp"
#include "csvor/rng.hpp"
#include "csvor/svorex.hpp"
#include "csvor/trainer.hpp"

namespace csvor {

namespace {

struct Options {
  std::string config;
  std::string in, out, model, report, trace;
  std::uint64_t seed = 0;
  std::optional<std::size_t> label_column;

  // synth
  std::size_t per_class = 50;
  double spacing = 4.0;
  std::size_t outliers = 0;
  double outlier_offset = 4.0;

  // inject
  std::string noise = "none";
  double feature_share = 0.5;

  // training
  std::string method = "csvor";
  double gamma = 1.0;
  double p = 2.0;
  std::string eps = "auto";
  double eps_fraction = 0.10;
  int eps_warmup = 5;
  double eps_floor = 1.0;
  std::string cap_scale = "g";
  double delta = 1e-12;
  int max_iters = 50;
  double tol = 1e-6;
  bool no_standardize = false;

  // bench
  std::vector<std::string> methods;
  std::vector<std::string> noises;
  std::vector<double> gammas;
  std::vector<double> ps;
  int repeats = 30;
  double train_fraction = 0.75;
  int folds = 5;
  std::string format = "json";
  int jobs = 1;
  bool cv_on_clean = false;
  std::string dataset_id;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_hyper(CLI::App* sub, Options& o) {
  sub->add_option("--gamma", o.gamma, "Regularization weight")->capture_default_str();
  sub->add_option("--p", o.p, "Loss exponent in (0, 2]")->capture_default_str();
  sub->add_option("--eps", o.eps, "Residual cap: auto or a value")->capture_default_str();
  sub->add_option("--eps-fraction", o.eps_fraction, "auto: fraction of samples above the cap")
      ->capture_default_str();
  sub->add_option("--eps-warmup", o.eps_warmup, "auto: iterations during which the cap adapts")
      ->capture_default_str();
  sub->add_option("--eps-floor", o.eps_floor, "auto: lower bound for the cap")->capture_default_str();
  sub->add_option("--cap-scale", o.cap_scale, "Scale of a fixed --eps: g or loss")
      ->capture_default_str();
  sub->add_option("--delta", o.delta, "Smoothing added to residuals")->capture_default_str();
  sub->add_option("--max-iters", o.max_iters, "Iteration limit")->capture_default_str();
  sub->add_option("--tol", o.tol, "Relative objective tolerance")->capture_default_str();
  sub->add_flag("--no-standardize", o.no_standardize, "Skip z-score scaling of features");
}

void add_label_column(CLI::App* sub, Options& o) {
  sub->add_option("--label-column", o.label_column, "Zero-based label column (default: last)");
}

void add_seed(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Master seed; a random one is chosen and printed if omitted");
}

void build(CLI::App& app, Options& o, bool strict) {
  app.require_subcommand(1);
  auto req = [strict](CLI::Option* opt) { opt->required(strict); };

  auto* synth = app.add_subcommand("synth", "Write a three-cluster 2-D ordinal dataset");
  req(synth->add_option("--out", o.out, "Output CSV"));
  synth->add_option("--per-class", o.per_class, "Samples per class")->capture_default_str();
  synth->add_option("--spacing", o.spacing, "Distance between cluster centres")->capture_default_str();
  synth->add_option("--outliers", o.outliers, "Far mislabeled points to append (multiple of 4)")
      ->capture_default_str();
  synth->add_option("--outlier-offset", o.outlier_offset, "Distance of outliers beyond the end clusters")
      ->capture_default_str();
  add_seed(synth, o);

  auto* inject = app.add_subcommand("inject", "Corrupt a dataset with label or feature noise");
  req(inject->add_option("--in", o.in, "Input CSV"));
  req(inject->add_option("--out", o.out, "Output CSV"));
  req(inject->add_option("--noise", o.noise, "label:<rate> or feature:<rate>"));
  inject->add_option("--feature-share", o.feature_share, "Share of features hit by feature noise")
      ->capture_default_str();
  add_label_column(inject, o);
  add_seed(inject, o);

  auto* train = app.add_subcommand("train", "Fit a model and write it with diagnostics");
  req(train->add_option("--in", o.in, "Training CSV"));
  req(train->add_option("--model", o.model, "Output model JSON"));
  train->add_option("--report", o.report, "Outlier report CSV (default: <model>.outliers.csv)");
  train->add_option("--trace", o.trace, "Objective trace CSV (default: <model>.trace.csv)");
  train->add_option("--method", o.method, "csvor or svorex")->capture_default_str();
  add_hyper(train, o);
  add_label_column(train, o);

  auto* predict = app.add_subcommand("predict", "Predict labels for a CSV");
  req(predict->add_option("--model", o.model, "Model JSON"));
  req(predict->add_option("--in", o.in, "Features CSV; a trailing label column is used for scoring"));
  req(predict->add_option("--out", o.out, "Output label CSV"));

  auto* bench = app.add_subcommand("bench", "Repeated-split benchmark with CV model selection");
  req(bench->add_option("--in", o.in, "Dataset CSV"));
  req(bench->add_option("--out", o.out, "Results file"));
  bench->add_option("--method", o.methods, "Method to include (repeatable; default both)")
      ->delimiter(',');
  bench->add_option("--noise", o.noises, "none, label:<rate> or feature:<rate> (repeatable)")
      ->delimiter(',');
  bench->add_option("--gammas", o.gammas, "Gamma grid (default 1e-3..1e3)")->delimiter(',');
  bench->add_option("--ps", o.ps, "p grid (default 0.5,0.7,1,1.5,1.7,2)")->delimiter(',');
  bench->add_option("--repeats", o.repeats, "Random splits")->capture_default_str();
  bench->add_option("--train-fraction", o.train_fraction, "Training share of each split")
      ->capture_default_str();
  bench->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  bench->add_option("--format", o.format, "json or csv")->capture_default_str();
  bench->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
  bench->add_flag("--cv-on-clean", o.cv_on_clean, "Select hyperparameters on the uncorrupted train side");
  bench->add_option("--feature-share", o.feature_share, "Share of features hit by feature noise")
      ->capture_default_str();
  bench->add_option("--dataset-id", o.dataset_id, "Name used in the results (default: file stem)");
  add_hyper(bench, o);
  add_label_column(bench, o);
  add_seed(bench, o);

  auto* plot = app.add_subcommand("plotdata", "Scatter rows and threshold lines for a 2-D dataset");
  req(plot->add_option("--model", o.model, "Model JSON"));
  req(plot->add_option("--in", o.in, "2-D dataset CSV"));
  req(plot->add_option("--out", o.out, "Output CSV"));
  add_label_column(plot, o);

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->add_option("--config", o.config, "key=value file; command-line flags take precedence");
  }
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Tokens for every config key whose flag was not given on the command line.
std::vector<std::string> config_tokens(const std::string& path, CLI::App* sub) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                            "' for " + sub->get_name());
    }
    if (opt->count() > 0) continue;
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

std::uint64_t resolve_seed(CLI::App* sub, const Options& o, std::ostream& out) {
  if (sub->count("--seed") > 0) return o.seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  out << "seed: " << seed << "\n";
  return seed;
}

CsvOptions csv_options(const Options& o) {
  CsvOptions c;
  c.label_column = o.label_column;
  return c;
}

HyperParams hyper(const Options& o) {
  HyperParams hp;
  hp.gamma = o.gamma;
  hp.p = o.p;
  hp.delta = o.delta;
  hp.max_iters = o.max_iters;
  hp.rel_tol = o.tol;
  hp.cap_scale = parse_cap_scale(o.cap_scale);
  if (o.eps == "auto") {
    hp.eps = EpsPolicy::quantile(o.eps_fraction, o.eps_warmup, o.eps_floor);
  } else {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(o.eps, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != o.eps.size()) {
      throw InvalidArgument("--eps must be auto or a number, got '" + o.eps + "'");
    }
    hp.eps = EpsPolicy::fixed(v);
  }
  hp.validate();
  return hp;
}

// Writes every file to a temp name first and renames only once all succeeded.
void commit(const std::vector<std::pair<std::string, std::string>>& files) {
  namespace fs = std::filesystem;
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& [path, content] : files) {
    fs::path tmp(path);
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw DataError("cannot write '" + path + "'");
    }
    temps.push_back(tmp);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw DataError("failed writing '" + path + "'");
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], files[i].first, ec);
    if (ec) {
      cleanup();
      throw DataError("cannot rename into '" + files[i].first + "'");
    }
  }
}

int cmd_synth(CLI::App* sub, const Options& o, std::ostream& out) {
  if (o.per_class == 0) throw InvalidArgument("--per-class must be positive");
  if (!(o.spacing > 0.0)) throw InvalidArgument("--spacing must be positive");
  if (o.outliers % 4 != 0) throw InvalidArgument("--outliers must be a multiple of 4");
  if (!(o.outlier_offset > 0.0)) throw InvalidArgument("--outlier-offset must be positive");
  const std::uint64_t seed = resolve_seed(sub, o, out);
  SynthConfig cfg = SynthConfig::three_clusters(o.per_class, o.spacing);
  if (o.outliers > 0) {
    cfg.outliers = flanking_outliers(o.outliers, o.spacing, o.outlier_offset, derive_seed(seed, {1}));
  }
  const Dataset ds = synth_gaussian_ordinal(cfg, derive_seed(seed, {0}));
  commit({{o.out, to_csv(ds)}});
  return kExitOk;
}

int cmd_inject(CLI::App* sub, const Options& o, std::ostream& out) {
  const NoiseSpec noise = NoiseSpec::parse(o.noise);
  if (!(o.feature_share >= 0.0 && o.feature_share <= 1.0)) {
    throw InvalidArgument("--feature-share must lie in [0, 1]");
  }
  const std::uint64_t seed = resolve_seed(sub, o, out);
  const Dataset ds = load_ordinal_csv(o.in, csv_options(o));
  Corrupted c;
  if (noise.kind == NoiseSpec::Kind::kLabel) {
    c = inject_label_noise(ds, noise.rate, seed);
  } else if (noise.kind == NoiseSpec::Kind::kFeature) {
    c = inject_feature_corruption(ds, noise.rate, o.feature_share, seed);
  } else {
    c.data = ds;
  }
  commit({{o.out, to_csv(c.data)}});
  out << "corrupted rows: " << c.corrupted_rows.size() << "\n";
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const Method method = parse_method(o.method);
  const HyperParams hp = hyper(o);
  const Dataset raw = load_ordinal_csv(o.in, csv_options(o));
  raw.validate_for_training();
  std::optional<Standardizer> st;
  Dataset ds = raw;
  if (!o.no_standardize) {
    st = Standardizer::fit(raw.features);
    ds = st->apply(raw);
  }

  ModelParams model;
  std::ostringstream report, trace;
  report << "index,g,d,flagged\n";
  trace << "iteration,objective\n";
  std::size_t flagged = 0;
  int iterations = 0;
  if (method == Method::kCsvor) {
    const TrainResult r = train_csvor(ds, hp);
    if (r.state.uncertified_solves > 0) {
      err << "error: " << r.state.uncertified_solves << " subproblem solve(s) were not certified\n";
      return kExitNumerical;
    }
    model = r.model;
    for (const OutlierEntry& e : outlier_report(r.state)) {
      report << e.index << ',' << num(e.g) << ',' << num(e.d) << ',' << (e.flagged ? 1 : 0) << '\n';
      flagged += e.flagged;
    }
    for (std::size_t t = 0; t < r.state.objective_trace.size(); ++t) {
      trace << t + 1 << ',' << num(r.state.objective_trace[t]) << '\n';
    }
    iterations = r.state.iteration;
  } else {
    const SvorexResult r = train_svorex(ds, hp.gamma);
    model = r.model;
    const Eigen::VectorXd scores = ds.features * model.w;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const HingePair h = hinge_components(scores(static_cast<Eigen::Index>(i)), ds.labels[i],
                                           model.b, ds.num_classes);
      report << i << ',' << num(h.squared_norm()) << ",1,0\n";
    }
    trace << "1," << num(r.objective) << '\n';
    iterations = 1;
  }
  model.standardizer = st;

  const std::string report_path = o.report.empty() ? o.model + ".outliers.csv" : o.report;
  const std::string trace_path = o.trace.empty() ? o.model + ".trace.csv" : o.trace;
  commit({{o.model, model_to_json(model)}, {report_path, report.str()}, {trace_path, trace.str()}});
  out << "iterations: " << iterations << "\nflagged: " << flagged << "\n";
  return kExitOk;
}

std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string f;
    bool numeric = true;
    while (std::getline(fields, f, ',')) {
      f = trim(f);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(f, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != f.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  return rows;
}

int cmd_predict(const Options& o, std::ostream& out) {
  const ModelParams model = load_model(o.model);
  const auto rows = read_numeric_rows(o.in);
  const Eigen::Index d = model.w.size();
  const std::size_t cols = rows.front().size();
  const bool labeled = static_cast<Eigen::Index>(cols) == d + 1;
  if (!labeled && static_cast<Eigen::Index>(cols) != d) {
    throw DataError("input has " + std::to_string(cols) + " columns, model expects " +
                    std::to_string(d) + " features");
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), d);
  std::vector<int> truth;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      x(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
    if (labeled) {
      const double y = rows[i].back();
      if (y != std::floor(y) || y < 1 || y > model.num_classes) {
        throw DataError("label on data row " + std::to_string(i + 1) + " is outside 1.." +
                        std::to_string(model.num_classes));
      }
      truth.push_back(static_cast<int>(y));
    }
  }
  const std::vector<int> pred = predict(model, x);
  std::ostringstream csv;
  csv << "label\n";
  for (int y : pred) csv << y << '\n';
  commit({{o.out, csv.str()}});
  if (labeled) out << "mze: " << num(mze(truth, pred)) << "\n";
  return kExitOk;
}

int cmd_bench(CLI::App* sub, const Options& o, std::ostream& out) {
  BenchmarkConfig cfg;
  cfg.base = hyper(o);
  if (o.format != "json" && o.format != "csv") throw InvalidArgument("--format must be json or csv");
  if (!o.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : o.methods) cfg.methods.push_back(parse_method(m));
  }
  if (!o.noises.empty()) {
    cfg.noises.clear();
    for (const auto& n : o.noises) cfg.noises.push_back(NoiseSpec::parse(n));
  }
  if (!o.gammas.empty()) cfg.grid.gammas = o.gammas;
  if (!o.ps.empty()) cfg.grid.ps = o.ps;
  for (double g : cfg.grid.gammas) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("grid gammas must be positive");
  }
  for (double p : cfg.grid.ps) {
    if (!(p > 0.0 && p <= 2.0)) throw InvalidArgument("grid p values must lie in (0, 2]");
  }
  if (o.folds < 2) throw InvalidArgument("--folds must be at least 2");
  if (o.jobs < 1) throw InvalidArgument("--jobs must be at least 1");
  if (!(o.feature_share >= 0.0 && o.feature_share <= 1.0)) {
    throw InvalidArgument("--feature-share must lie in [0, 1]");
  }
  cfg.split.num_repeats = o.repeats;
  cfg.split.train_fraction = o.train_fraction;
  cfg.split.validate();
  cfg.folds = o.folds;
  cfg.jobs = o.jobs;
  cfg.cv_on_clean = o.cv_on_clean;
  cfg.feature_share = o.feature_share;
  cfg.standardize = !o.no_standardize;
  cfg.dataset_id = o.dataset_id.empty() ? std::filesystem::path(o.in).stem().string() : o.dataset_id;
  cfg.split.seed = resolve_seed(sub, o, out);

  const Dataset ds = load_ordinal_csv(o.in, csv_options(o));
  const auto results = run_benchmark(ds, cfg);
  commit({{o.out, o.format == "json" ? benchmark_json(results) : benchmark_csv(results)}});
  for (const BenchmarkResult& r : results) {
    out << to_string(r.method) << ' ' << r.noise.to_string() << ": mean " << num(r.mean) << " std "
        << num(r.std) << " failed " << r.failed_cells() << "\n";
  }
  return kExitOk;
}

// Clips the line v.x = c to the box; empty when it misses the box.
std::optional<std::array<double, 4>> clip_line(double v1, double v2, double c, double x0, double x1,
                                               double y0, double y1) {
  std::vector<std::pair<double, double>> pts;
  if (std::abs(v2) > 0.0) {
    for (double x : {x0, x1}) {
      const double y = (c - v1 * x) / v2;
      if (y >= y0 && y <= y1) pts.emplace_back(x, y);
    }
  }
  if (std::abs(v1) > 0.0) {
    for (double y : {y0, y1}) {
      const double x = (c - v2 * y) / v1;
      if (x >= x0 && x <= x1) pts.emplace_back(x, y);
    }
  }
  if (pts.size() < 2) return std::nullopt;
  std::sort(pts.begin(), pts.end());
  return std::array<double, 4>{pts.front().first, pts.front().second, pts.back().first,
                               pts.back().second};
}

int cmd_plotdata(const Options& o) {
  const ModelParams model = load_model(o.model);
  const Dataset ds = load_ordinal_csv(o.in, csv_options(o));
  if (ds.dim() != 2 || model.w.size() != 2) throw DataError("plotdata needs 2-D data and a 2-D model");
  if (ds.num_classes > model.num_classes) {
    throw DataError("dataset has more classes than the model");
  }

  Eigen::Vector2d v = model.w;
  double shift = 0.0;
  if (model.standardizer) {
    v = model.w.cwiseQuotient(model.standardizer->scales);
    shift = v.dot(model.standardizer->means);
  }
  const Eigen::VectorXd scores = ds.features * v - Eigen::VectorXd::Constant(ds.features.rows(), shift);

  std::ostringstream csv;
  csv << "kind,index,x1,y1,x2,y2,label,flagged\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double g =
        hinge_components(scores(r), ds.labels[i], model.b, model.num_classes).squared_norm();
    csv << "point," << i << ',' << num(ds.features(r, 0)) << ',' << num(ds.features(r, 1)) << ",,,"
        << ds.labels[i] << ',' << (g > model.eps_g ? 1 : 0) << '\n';
  }
  const Eigen::Vector2d lo = ds.features.colwise().minCoeff();
  const Eigen::Vector2d hi = ds.features.colwise().maxCoeff();
  const Eigen::Vector2d pad = ((hi - lo) * 0.1).cwiseMax(1.0);
  for (Eigen::Index k = 0; k < model.b.size(); ++k) {
    const auto seg = clip_line(v(0), v(1), model.b(k) + shift, lo(0) - pad(0), hi(0) + pad(0),
                               lo(1) - pad(1), hi(1) + pad(1));
    if (!seg) continue;
    csv << "threshold," << k + 1 << ',' << num((*seg)[0]) << ',' << num((*seg)[1]) << ','
        << num((*seg)[2]) << ',' << num((*seg)[3]) << ",,\n";
  }
  commit({{o.out, csv.str()}});
  return kExitOk;
}

int parse_into(CLI::App& app, std::vector<std::string> args, std::ostream& out, std::ostream& err,
               bool& done) {
  done = false;
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    done = true;
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    if (e.get_name() != "RequiredError" || app.get_subcommands().empty()) {
      err << "run with --help for usage\n";
    }
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    // The first pass only locates the config file, so required flags may
    // still come from it.
    Options first;
    CLI::App app1{"Capped lp-norm support vector ordinal regression", "csvor"};
    build(app1, first, false);
    bool done = false;
    int code = parse_into(app1, args, out, err, done);
    if (done) return code;

    std::vector<std::string> merged = args;
    if (!first.config.empty()) {
      for (auto& t : config_tokens(first.config, app1.get_subcommands().front())) {
        merged.push_back(std::move(t));
      }
    }
    Options o;
    CLI::App app2{"Capped lp-norm support vector ordinal regression", "csvor"};
    build(app2, o, true);
    code = parse_into(app2, merged, out, err, done);
    if (done) return code;
    CLI::App* sub = app2.get_subcommands().front();

    const std::string name = sub->get_name();
    if (name == "synth") return cmd_synth(sub, o, out);
    if (name == "inject") return cmd_inject(sub, o, out);
    if (name == "train") return cmd_train(o, out, err);
    if (name == "predict") return cmd_predict(o, out);
    if (name == "bench") return cmd_bench(sub, o, out);
    return cmd_plotdata(o);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace csvor
