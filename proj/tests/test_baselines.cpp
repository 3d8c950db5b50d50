#include <random>

#include "csvor/common.hpp"
#include "csvor/svorex.hpp"
#include "doctest.h"

using namespace csvor;
using Eigen::VectorXd;

namespace {

Dataset two_points() {
  Dataset ds;
  ds.num_classes = 2;
  ds.features.resize(2, 1);
  ds.features << -1.0, 1.0;
  ds.labels = {1, 2};
  return ds;
}

Dataset noisy_clusters(std::uint64_t seed, int per_class, int K) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Dataset ds;
  ds.num_classes = K;
  ds.features.resize(per_class * K, 2);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < per_class; ++j) {
      const int i = k * per_class + j;
      ds.features(i, 0) = 2.0 * k + nd(gen);
      ds.features(i, 1) = nd(gen);
      ds.labels.push_back(k + 1);
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("two-point problem has the hand-derived solution") {
  const SvorexResult small = train_svorex(two_points(), 4.0);
  CHECK(small.model.w(0) == doctest::Approx(0.25));
  CHECK(small.model.b(0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(small.objective == doctest::Approx(1.75));

  const SvorexResult loose = train_svorex(two_points(), 0.5);
  CHECK(loose.model.w(0) == doctest::Approx(1.0));
  CHECK(loose.objective == doctest::Approx(0.5));
}

TEST_CASE("solution is certified and beats perturbed points") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Dataset ds = noisy_clusters(seed, 15, 3 + static_cast<int>(seed % 2));
    const double gamma = seed % 2 ? 0.01 : 1.0;
    const SvorexResult r = train_svorex(ds, gamma);
    CHECK(r.qp.certified);
    CHECK(r.objective == doctest::Approx(svorex_objective(r.model.linear(), ds, gamma)));
    for (Eigen::Index k = 1; k < r.model.b.size(); ++k) CHECK(r.model.b(k) >= r.model.b(k - 1));
    CHECK(r.model.method == Method::kSvorex);

    std::mt19937_64 gen(seed + 100);
    std::normal_distribution<double> nd(0.0, 1e-2);
    for (int t = 0; t < 100; ++t) {
      LinearOrdinal p = r.model.linear();
      for (Eigen::Index j = 0; j < p.w.size(); ++j) p.w(j) += nd(gen);
      for (Eigen::Index j = 0; j < p.b.size(); ++j) p.b(j) += nd(gen);
      std::sort(p.b.data(), p.b.data() + p.b.size());
      CHECK(svorex_objective(p, ds, gamma) >= r.objective - 1e-9);
    }
  }
}

TEST_CASE("slacks equal the hinges at the solution") {
  const Dataset ds = noisy_clusters(7, 12, 3);
  const SvorexResult r = train_svorex(ds, 0.1);
  const VectorXd s = ds.features * r.model.w;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const HingePair h = hinge_components(s(idx), ds.labels[i], r.model.b, 3);
    CHECK(r.xi_lower(idx) == doctest::Approx(h.lower).epsilon(1e-7).scale(1.0));
    CHECK(r.xi_upper(idx) == doctest::Approx(h.upper).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("separable data is classified perfectly") {
  Dataset ds;
  ds.num_classes = 3;
  ds.features.resize(6, 1);
  ds.features << -5, -4, 0, 1, 5, 6;
  ds.labels = {1, 1, 2, 2, 3, 3};
  const SvorexResult r = train_svorex(ds, 0.01);
  CHECK(predict(r.model, ds.features) == ds.labels);
  CHECK(r.xi_lower.norm() < 1e-9);
  CHECK(r.xi_upper.norm() < 1e-9);
}

TEST_CASE("bad input") {
  CHECK_THROWS_AS(train_svorex(two_points(), 0.0), InvalidArgument);
  Dataset one = two_points();
  one.labels = {1, 1};
  CHECK_THROWS_AS(train_svorex(one, 1.0), DataError);
}
