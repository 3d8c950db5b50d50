#include <algorithm>
#include <set>

#include "csvor/common.hpp"
#include "csvor/data.hpp"
#include "csvor/rng.hpp"
#include "doctest.h"

using namespace csvor;

namespace {

Dataset small_dataset() {
  Dataset ds;
  ds.features.resize(6, 2);
  ds.features << 0.5, 1.0, 1.5, -2.0, 2.5, 3.0, 3.5, 0.25, 4.5, 1e-7, 5.5, 123456.789;
  ds.labels = {1, 1, 2, 2, 3, 3};
  ds.num_classes = 3;
  return ds;
}

Dataset balanced(std::size_t per_class, int k) {
  Dataset ds;
  ds.num_classes = k;
  ds.features.resize(static_cast<Eigen::Index>(per_class) * k, 1);
  for (int c = 1; c <= k; ++c) {
    for (std::size_t j = 0; j < per_class; ++j) {
      const auto i = static_cast<Eigen::Index>((c - 1) * per_class + j);
      ds.features(i, 0) = static_cast<double>(i);
      ds.labels.push_back(c);
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("csv with header and label in the last column") {
  const auto loaded = parse_csv("a,b,label\n1,2,1\n3,4,2\n5,6,3\n");
  const Dataset& ds = std::get<Dataset>(loaded);
  CHECK(ds.size() == 3);
  CHECK(ds.dim() == 2);
  CHECK(ds.num_classes == 3);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.features(2, 1) == 6.0);
  CHECK(ds.labels == std::vector<int>{1, 2, 3});
}

TEST_CASE("csv without header and explicit label column") {
  CsvOptions opt;
  opt.label_column = 0;
  const Dataset ds = std::get<Dataset>(parse_csv("2,0.5,7\n1,1.5,8\n", opt));
  CHECK(ds.labels == std::vector<int>{2, 1});
  CHECK(ds.features(1, 1) == 8.0);
}

TEST_CASE("csv errors") {
  CHECK_THROWS_AS(parse_csv(""), DataError);
  CHECK_THROWS_AS(parse_csv("1,2\n3\n"), DataError);
  CHECK_THROWS_AS(parse_csv("1,1.5\n"), DataError);
  CHECK_THROWS_AS(parse_csv("1,0\n"), DataError);
  CHECK_THROWS_AS(parse_csv("x,1\n"), DataError);
  CHECK_THROWS_AS(parse_csv("a,b\n"), DataError);
  CHECK_THROWS_AS(load_ordinal_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("csv round trip is exact") {
  const Dataset ds = small_dataset();
  const Dataset back = std::get<Dataset>(parse_csv(to_csv(ds)));
  CHECK(back.features == ds.features);
  CHECK(back.labels == ds.labels);
  CHECK(back.num_classes == ds.num_classes);
}

TEST_CASE("regression mode and equal-frequency bins") {
  CsvOptions opt;
  opt.mode = LabelMode::kRegression;
  const auto r = std::get<RegressionData>(parse_csv("1,0.3\n2,0.1\n3,0.2\n4,0.9\n5,0.5\n", opt));
  CHECK(r.targets.size() == 5);
  const std::vector<int> bins = equal_frequency_bins(r.targets, 2);
  CHECK(bins == std::vector<int>{1, 1, 1, 2, 2});

  Eigen::VectorXd ties = Eigen::VectorXd::Zero(7);
  const std::vector<int> tb = equal_frequency_bins(ties, 3);
  std::vector<int> counts(3, 0);
  for (int b : tb) ++counts[static_cast<std::size_t>(b - 1)];
  CHECK(*std::max_element(counts.begin(), counts.end()) -
            *std::min_element(counts.begin(), counts.end()) <=
        1);
}

TEST_CASE("dataset validation") {
  Dataset ds = small_dataset();
  CHECK_NOTHROW(ds.validate_for_training());
  ds.labels[0] = 4;
  CHECK_THROWS_AS(ds.validate(), DataError);
  ds = small_dataset();
  ds.labels = {2, 2, 2, 2, 2, 2};
  CHECK_NOTHROW(ds.validate());
  CHECK_THROWS_AS(ds.validate_for_training(), DataError);
  ds = small_dataset();
  ds.features(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ds.validate(), DataError);
}

TEST_CASE("standardizer and min-max scaler") {
  Dataset ds = small_dataset();
  ds.features.col(1).setConstant(4.0);
  const Standardizer st = Standardizer::fit(ds.features);
  const Eigen::MatrixXd z = st.apply(ds.features);
  CHECK(std::abs(z.col(0).mean()) < 1e-12);
  CHECK(std::abs(z.col(0).array().square().mean() - 1.0) < 1e-12);
  CHECK(st.scales(1) == 1.0);
  CHECK(z.col(1).isZero());

  const MinMaxScaler mm = MinMaxScaler::fit(ds.features);
  const Eigen::MatrixXd u = mm.apply(ds.features);
  CHECK(u.col(0).minCoeff() == 0.0);
  CHECK(u.col(0).maxCoeff() == 1.0);
  CHECK(u.col(1).isZero());
}

TEST_CASE("stratified split partitions each class") {
  const Dataset ds = balanced(20, 3);
  SplitSpec spec;
  spec.seed = 42;
  const Split s = stratified_split(ds, spec, 3);
  CHECK(s.train.size() == 45);
  CHECK(s.test.size() == 15);
  std::set<std::size_t> all(s.train_rows.begin(), s.train_rows.end());
  for (std::size_t r : s.test_rows) CHECK(all.insert(r).second);
  CHECK(all.size() == ds.size());
  CHECK(s.train.class_counts() == std::vector<std::size_t>{15, 15, 15});

  const Split again = stratified_split(ds, spec, 3);
  CHECK(again.train_rows == s.train_rows);
  CHECK(stratified_split(ds, spec, 4).train_rows != s.train_rows);

  spec.train_fraction = 1.5;
  CHECK_THROWS_AS(stratified_split(ds, spec, 0), InvalidArgument);
}

TEST_CASE("label noise changes exactly the listed rows to other classes") {
  const Dataset ds = balanced(20, 4);
  const Corrupted c = inject_label_noise(ds, 0.2, 7);
  CHECK(c.corrupted_rows.size() == 16);
  std::set<std::size_t> hit(c.corrupted_rows.begin(), c.corrupted_rows.end());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (hit.count(i)) {
      CHECK(c.data.labels[i] != ds.labels[i]);
      CHECK(c.data.labels[i] >= 1);
      CHECK(c.data.labels[i] <= 4);
    } else {
      CHECK(c.data.labels[i] == ds.labels[i]);
    }
  }
  CHECK(c.data.features == ds.features);
  CHECK(inject_label_noise(ds, 0.2, 7).data.labels == c.data.labels);
  CHECK(inject_label_noise(ds, 0.0, 7).corrupted_rows.empty());
  CHECK_THROWS_AS(inject_label_noise(ds, 1.5, 7), InvalidArgument);
}

TEST_CASE("feature corruption sets a share of features to -1") {
  Dataset ds = balanced(10, 3);
  ds.features.conservativeResize(Eigen::NoChange, 4);
  ds.features.rightCols(3).setConstant(0.5);
  const Corrupted c = inject_feature_corruption(ds, 0.1, 0.5, 3);
  CHECK(c.corrupted_rows.size() == 3);
  std::set<std::size_t> hit(c.corrupted_rows.begin(), c.corrupted_rows.end());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const long sentinels = (c.data.features.row(r).array() == -1.0).count();
    CHECK(sentinels == (hit.count(i) ? 2 : 0));
    CHECK(c.data.features.row(r).minCoeff() >= -1.0);
    CHECK(c.data.features.row(r).maxCoeff() <= 1.0);
  }
  CHECK(c.data.labels == ds.labels);
}

TEST_CASE("synthetic clusters and outliers") {
  const SynthConfig cfg = SynthConfig::three_clusters(30, 4.0);
  const Dataset ds = synth_gaussian_ordinal(cfg, 11);
  CHECK(ds.size() == 90);
  CHECK(ds.dim() == 2);
  CHECK(ds.class_counts() == std::vector<std::size_t>{30, 30, 30});
  CHECK(synth_gaussian_ordinal(cfg, 11).features == ds.features);
  CHECK(synth_gaussian_ordinal(cfg, 12).features != ds.features);

  const auto out = flanking_outliers(8, 4.0, 4.0, 5);
  CHECK(out.size() == 8);
  std::vector<int> labels;
  for (const auto& p : out) labels.push_back(p.label);
  CHECK(std::count(labels.begin(), labels.end(), 2) == 4);
  CHECK_THROWS_AS(flanking_outliers(6, 4.0, 4.0, 5), InvalidArgument);

  SynthConfig with = cfg;
  with.outliers = out;
  CHECK(synth_gaussian_ordinal(with, 11).size() == 98);
}

TEST_CASE("rng streams are reproducible and keyed") {
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  Rng r(9);
  const auto pick = r.sample_without_replacement(10, 10);
  CHECK(std::set<std::size_t>(pick.begin(), pick.end()).size() == 10);
  double sum = 0.0;
  Rng n(3);
  for (int i = 0; i < 20000; ++i) sum += n.normal();
  CHECK(std::abs(sum / 20000) < 0.05);
}
