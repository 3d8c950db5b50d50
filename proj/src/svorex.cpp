#include "csvor/svorex.hpp"

#include <cmath>

#include "csvor/common.hpp"

namespace csvor {

double svorex_objective(const LinearOrdinal& model, const Dataset& ds, double gamma) {
  const Eigen::VectorXd scores = ds.features * model.w;
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto h = hinge_components(scores(static_cast<Eigen::Index>(i)), ds.labels[i], model.b,
                                    ds.num_classes);
    total += h.lower + h.upper;
  }
  return total + gamma * model.w.squaredNorm();
}

namespace {

struct Layout {
  Eigen::Index d = 0, nb = 0, n = 0;
  std::vector<Eigen::Index> lower_var;  // -1 when the sample has no lower hinge
  std::vector<Eigen::Index> upper_var;
};

Layout layout(const Dataset& ds) {
  Layout L;
  L.d = static_cast<Eigen::Index>(ds.dim());
  L.nb = ds.num_classes - 1;
  Eigen::Index next = L.d + L.nb;
  L.lower_var.assign(ds.size(), -1);
  L.upper_var.assign(ds.size(), -1);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const HingeMask mask = hinge_mask(ds.labels[i], ds.num_classes);
    if (has_lower(mask)) L.lower_var[i] = next++;
    if (has_upper(mask)) L.upper_var[i] = next++;
  }
  L.n = next;
  return L;
}

}  // namespace

QpProblem assemble_svorex_qp(const Dataset& ds, double gamma) {
  const Layout L = layout(ds);
  const Eigen::Index slacks = L.n - L.d - L.nb;
  const Eigen::Index m = 2 * slacks + std::max<Eigen::Index>(L.nb - 1, 0);

  QpProblem qp;
  qp.Q = Eigen::MatrixXd::Zero(L.n, L.n);
  qp.Q.topLeftCorner(L.d, L.d).diagonal().setConstant(2.0 * gamma);
  qp.c = Eigen::VectorXd::Zero(L.n);
  qp.c.tail(slacks).setOnes();
  qp.G = Eigen::MatrixXd::Zero(m, L.n);
  qp.h = Eigen::VectorXd::Zero(m);

  Eigen::Index row = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const int y = ds.labels[i];
    if (L.lower_var[i] >= 0) {
      // -x'w + b_{y-1} - xi <= -1
      qp.G.row(row).head(L.d) = -ds.features.row(ii);
      qp.G(row, L.d + y - 2) = 1.0;
      qp.G(row, L.lower_var[i]) = -1.0;
      qp.h(row++) = -1.0;
    }
    if (L.upper_var[i] >= 0) {
      // x'w - b_y - xi* <= -1
      qp.G.row(row).head(L.d) = ds.features.row(ii);
      qp.G(row, L.d + y - 1) = -1.0;
      qp.G(row, L.upper_var[i]) = -1.0;
      qp.h(row++) = -1.0;
    }
  }
  for (Eigen::Index v = L.d + L.nb; v < L.n; ++v) qp.G(row++, v) = -1.0;
  for (Eigen::Index k = 0; k + 1 < L.nb; ++k) {
    qp.G(row, L.d + k) = 1.0;
    qp.G(row++, L.d + k + 1) = -1.0;
  }
  return qp;
}

SvorexResult train_svorex(const Dataset& ds, double gamma) {
  ds.validate_for_training();
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be positive and finite");
  const Layout L = layout(ds);
  const QpProblem qp = assemble_svorex_qp(ds, gamma);

  // w = 0, b = 0, every slack 1: feasible with all margin constraints tight.
  Eigen::VectorXd start = Eigen::VectorXd::Zero(L.n);
  start.tail(L.n - L.d - L.nb).setOnes();

  SvorexResult out;
  out.qp = solve_qp(qp, start);
  if (!out.qp.certified) {
    throw NumericalError("SVOREX QP not certified (KKT residual " +
                         std::to_string(out.qp.kkt_residual) + ")");
  }
  const Eigen::VectorXd& z = out.qp.z;
  out.model.w = z.head(L.d);
  out.model.b = z.segment(L.d, L.nb);
  for (Eigen::Index k = 1; k < out.model.b.size(); ++k) {
    out.model.b(k) = std::max(out.model.b(k), out.model.b(k - 1));
  }
  out.model.num_classes = ds.num_classes;
  out.model.method = Method::kSvorex;
  out.model.gamma = gamma;
  out.model.p = 1.0;
  out.model.eps_g = std::numeric_limits<double>::infinity();

  const auto nn = static_cast<Eigen::Index>(ds.size());
  out.xi_lower = Eigen::VectorXd::Zero(nn);
  out.xi_upper = Eigen::VectorXd::Zero(nn);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (L.lower_var[i] >= 0) out.xi_lower(ii) = z(L.lower_var[i]);
    if (L.upper_var[i] >= 0) out.xi_upper(ii) = z(L.upper_var[i]);
  }
  out.objective = out.qp.objective;
  return out;
}

}  // namespace csvor
