#include <cmath>
#include <limits>
#include <random>

#include "csvor/common.hpp"
#include "csvor/losses.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace csvor;
using Eigen::VectorXd;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

VectorXd thresholds(std::initializer_list<double> v) {
  VectorXd b(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) b(i++) = x;
  return b;
}

}  // namespace

TEST_CASE("hinge components on hand-worked points") {
  const VectorXd b = thresholds({-1.0, 1.0});
  HingePair h = hinge_components(0.0, 2, b, 3);
  CHECK(h.lower == 0.0);
  CHECK(h.upper == 0.0);
  CHECK(h.mask == HingeMask::kBoth);

  h = hinge_components(3.0, 1, b, 3);
  CHECK(h.mask == HingeMask::kUpperOnly);
  CHECK(h.lower == 0.0);
  CHECK(h.upper == doctest::Approx(5.0));

  h = hinge_components(-2.0, 3, b, 3);
  CHECK(h.mask == HingeMask::kLowerOnly);
  CHECK(h.lower == doctest::Approx(4.0));
  CHECK(h.upper == 0.0);

  h = hinge_components(0.5, 2, b, 3);
  CHECK(h.upper == doctest::Approx(0.5));
  CHECK(h.squared_norm() == doctest::Approx(0.25));

  CHECK_THROWS_AS(hinge_components(0.0, 4, b, 3), InvalidArgument);
  CHECK_THROWS_AS(hinge_components(0.0, 1, b, 4), InvalidArgument);
}

TEST_CASE("capped loss values") {
  HingePair h;
  h.lower = 3.0;
  h.upper = 4.0;
  CHECK(capped_lp_loss(h, 2.0, kInf) == doctest::Approx(25.0));
  CHECK(capped_lp_loss(h, 1.0, kInf) == doctest::Approx(5.0));
  CHECK(capped_lp_loss(h, 1.0, 4.0) == doctest::Approx(2.0));
  CHECK(capped_lp_loss(h, 0.5, 16.0) == doctest::Approx(2.0));
  CHECK(capped_lp_loss(HingePair{}, 1.0, 1.0) == 0.0);
  CHECK(capped_lp_loss(HingePair{}, 1.0, 1.0, 1e-12) == doctest::Approx(1e-6));
  CHECK_THROWS_AS(capped_lp_loss(h, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(capped_lp_loss(h, 2.5, 1.0), InvalidArgument);
  CHECK_THROWS_AS(capped_lp_loss(h, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("loss is bounded by the cap and nondecreasing in the residual") {
  for (double p : {0.5, 1.0, 1.7, 2.0}) {
    double prev = 0.0;
    for (double r = 0.0; r < 10.0; r += 0.25) {
      HingePair h;
      h.upper = r;
      const double v = capped_lp_loss(h, p, 9.0);
      CHECK(v >= prev);
      CHECK(v <= std::pow(9.0, p / 2) + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("slack identity against a grid search") {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const int K = 2 + static_cast<int>(gen() % 5);
    VectorXd b(K - 1);
    for (int k = 0; k < K - 1; ++k) b(k) = nd(gen);
    std::sort(b.data(), b.data() + b.size());
    const double s = nd(gen);
    const int y = 1 + static_cast<int>(gen() % static_cast<unsigned>(K));

    const HingePair h = hinge_components(s, y, b, K);
    const oracle::Hinges ref = oracle::hinges(s, y, b, K);
    CHECK(h.lower == doctest::Approx(ref.lower).epsilon(1e-14));
    CHECK(h.upper == doctest::Approx(ref.upper).epsilon(1e-14));

    const double want = ref.lower * ref.lower + ref.upper * ref.upper;
    CHECK(std::abs(oracle::grid_min_slack_g(s, y, b, K) - want) <= 1e-6);
    const SlackPair m = optimal_slack(s, y, b, K);
    CHECK(m.m_lower >= 0.0);
    CHECK(m.m_upper >= 0.0);
    CHECK(std::abs(slack_residual_g(s, y, b, K, m) - want) <= 1e-9);
  }
}

TEST_CASE("objectives on a tiny dataset") {
  Dataset ds;
  ds.features.resize(3, 1);
  ds.features << -2.0, 0.0, 5.0;
  ds.labels = {1, 2, 1};
  ds.num_classes = 2;
  LinearOrdinal m{VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 0.0)};
  // Hinges: sample 1 none, sample 2 lower 1, sample 3 upper 6.
  CHECK(capped_objective(m, ds, 0.5, 2.0, kInf) == doctest::Approx(1.0 + 36.0 + 0.5));
  CHECK(capped_objective(m, ds, 0.5, 1.0, 4.0) == doctest::Approx(1.0 + 2.0 + 0.5));

  std::vector<SlackPair> slack(3);
  VectorXd d = VectorXd::Ones(3);
  // Zero slack: residuals -2+0+1 = -1, 0-0-1 = -1, 5-0+1 = 6.
  CHECK(surrogate_objective(m, ds, slack, d, 0.5) == doctest::Approx(1.0 + 1.0 + 36.0 + 0.5));
  for (std::size_t i = 0; i < 3; ++i) {
    slack[i] = optimal_slack(ds.features(static_cast<Eigen::Index>(i), 0), ds.labels[i], m.b, 2);
  }
  CHECK(surrogate_objective(m, ds, slack, d, 0.5) == doctest::Approx(1.0 + 36.0 + 0.5));
  d(2) = 0.0;
  CHECK(surrogate_objective(m, ds, slack, d, 0.5) == doctest::Approx(1.0 + 0.5));
}
