#pragma once

// Independent reference computations used only by tests. None of these call
// into the library code paths they are used to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

// Projected gradient on the dual of a strictly convex QP
//   min 0.5 z'Qz + c'z  s.t. Gz <= h.
// The dual feasible set is the nonnegative orthant, so the projection is a
// clamp. Step 1/L with L the largest eigenvalue of G Q^-1 G'.
inline Eigen::VectorXd dual_projected_gradient(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c,
                                               const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                                               long max_iters = 1000000) {
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  const Eigen::MatrixXd QiGt = llt.solve(G.transpose());
  const Eigen::VectorXd Qic = llt.solve(c);
  const Eigen::MatrixXd M = G * QiGt;
  const Eigen::VectorXd q = G * Qic + h;
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().maxCoeff();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(h.size());
  if (L > 0) {
    const double step = 1.0 / L;
    for (long it = 0; it < max_iters; ++it) {
      Eigen::VectorXd next = (mu - step * (M * mu + q)).cwiseMax(0.0);
      const double change = (next - mu).lpNorm<Eigen::Infinity>();
      mu.swap(next);
      if (change == 0.0) break;
    }
  }
  return -(Qic + QiGt * mu);
}

// Exact solve of a strictly convex QP by enumerating active sets (m small).
inline std::optional<Eigen::VectorXd> enumerate_active_sets(const Eigen::MatrixXd& Q,
                                                            const Eigen::VectorXd& c,
                                                            const Eigen::MatrixXd& G,
                                                            const Eigen::VectorXd& h) {
  const long m = h.size();
  const long n = c.size();
  std::optional<Eigen::VectorXd> best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << m); ++mask) {
    std::vector<long> act;
    for (long j = 0; j < m; ++j)
      if (mask & (1L << j)) act.push_back(j);
    const long a = static_cast<long>(act.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + a, n + a);
    Eigen::VectorXd rhs(n + a);
    K.topLeftCorner(n, n) = Q;
    rhs.head(n) = -c;
    for (long k = 0; k < a; ++k) {
      K.block(n + k, 0, 1, n) = G.row(act[k]);
      K.block(0, n + k, n, 1) = G.row(act[k]).transpose();
      rhs(n + k) = h(act[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + a) continue;
    Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::VectorXd z = sol.head(n);
    bool ok = true;
    for (long k = 0; k < a; ++k)
      if (sol(n + k) < -1e-9) ok = false;
    if (m > 0 && ((G * z - h).array() > 1e-9).any()) ok = false;
    if (!ok) continue;
    const double obj = 0.5 * z.dot(Q * z) + c.dot(z);
    if (obj < best_obj) {
      best_obj = obj;
      best = z;
    }
  }
  return best;
}

// Hinge pair of a sample written directly from the threshold model; labels
// are 1..K and b holds b_1..b_{K-1}.
struct Hinges {
  double lower = 0.0;
  double upper = 0.0;
};

inline Hinges hinges(double s, int y, const Eigen::VectorXd& b, int K) {
  Hinges h;
  if (y > 1) h.lower = std::max(0.0, 1.0 - s + b(y - 2));
  if (y < K) h.upper = std::max(0.0, 1.0 + s - b(y - 1));
  return h;
}

// min over m >= 0 of (v - m)^2 by grid search: a 400-point grid on [0, M]
// with M doubled until the best point is off the right edge, then zoomed
// around the best point until the spacing is below 1e-7.
inline double grid_min_one_sided(double v) {
  const int n = 400;
  double hi = 1.0;
  auto scan = [&](double a, double b, double& best_m) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const double m = a + (b - a) * i / (n - 1);
      const double f = (v - m) * (v - m);
      if (f < best) {
        best = f;
        best_m = m;
      }
    }
    return best;
  };
  double best_m = 0.0;
  double best = scan(0.0, hi, best_m);
  while (best_m >= hi) {
    hi *= 2.0;
    best = scan(0.0, hi, best_m);
  }
  double width = hi / (n - 1);
  while (width > 1e-7) {
    const double a = std::max(0.0, best_m - 2.0 * width);
    const double b = best_m + 2.0 * width;
    best = std::min(best, scan(a, b, best_m));
    width = (b - a) / (n - 1);
  }
  return best;
}

// Slack-minimized squared residual of one sample by grid search over the
// lower slack (residual s - b_{y-1} - 1 - m) and the upper slack (residual
// s - b_y + 1 + m, i.e. m - (b_y - 1 - s)). The two slacks enter separate
// terms.
inline double grid_min_slack_g(double s, int y, const Eigen::VectorXd& b, int K) {
  double g = 0.0;
  if (y > 1) g += grid_min_one_sided(s - b(y - 2) - 1.0);
  if (y < K) g += grid_min_one_sided(b(y - 1) - 1.0 - s);
  return g;
}

// Weighted squared-hinge SVOR as a QP with one slack per margin:
//   min gamma |w|^2 + sum d_i xi^2
//   s.t. x_i'w - b_{y-1} >= 1 - xi,  b_y - x_i'w >= 1 - xi,  b_k <= b_{k+1}.
// Variables are (w, b, xi); samples with d_i = 0 are left out.
struct DenseQp {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

inline DenseQp squared_hinge_qp(const Eigen::MatrixXd& X, const std::vector<int>& y, int K,
                                const Eigen::VectorXd& d, double gamma) {
  const long n = X.rows();
  const long dim = X.cols();
  std::vector<std::pair<long, int>> rows;  // (sample, -1 lower / +1 upper)
  for (long i = 0; i < n; ++i) {
    if (d(i) == 0.0) continue;
    if (y[i] > 1) rows.emplace_back(i, -1);
    if (y[i] < K) rows.emplace_back(i, +1);
  }
  const long ns = static_cast<long>(rows.size());
  const long nv = dim + (K - 1) + ns;
  DenseQp qp;
  qp.Q = Eigen::MatrixXd::Zero(nv, nv);
  qp.c = Eigen::VectorXd::Zero(nv);
  qp.Q.topLeftCorner(dim, dim).diagonal().setConstant(2.0 * gamma);
  const long m = ns + (K - 2);
  qp.G = Eigen::MatrixXd::Zero(m, nv);
  qp.h = Eigen::VectorXd::Zero(m);
  for (long r = 0; r < ns; ++r) {
    const long i = rows[r].first;
    const long xi = dim + (K - 1) + r;
    qp.Q(xi, xi) = 2.0 * d(i);
    if (rows[r].second < 0) {
      qp.G.block(r, 0, 1, dim) = -X.row(i);
      qp.G(r, dim + y[i] - 2) = 1.0;
    } else {
      qp.G.block(r, 0, 1, dim) = X.row(i);
      qp.G(r, dim + y[i] - 1) = -1.0;
    }
    qp.G(r, xi) = -1.0;
    qp.h(r) = -1.0;
  }
  for (long k = 0; k + 1 < K - 1; ++k) {
    qp.G(ns + k, dim + k) = 1.0;
    qp.G(ns + k, dim + k + 1) = -1.0;
  }
  return qp;
}

}  // namespace oracle
