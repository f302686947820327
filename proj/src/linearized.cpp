#include "qot/linearized.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

#include "qot/kernels.hpp"
#include "qot/solver.hpp"

namespace qot {

namespace {

constexpr Eigen::Index kDenseEigLimit = 4000;
constexpr double kDefectLimit = 1e-8;

Eigen::VectorXd stack(const DualPair& d) {
  Eigen::VectorXd v(d.f.size() + d.g.size());
  v << d.f, d.g;
  return v;
}

// Similarity transform taking the weighted inner product to the Euclidean
// one: A = D^{1/2} M D^{-1/2}.
Eigen::MatrixXd conjugate_by_sqrt_weights(const OperatorMatrix& op) {
  const Eigen::Index nm = op.m.rows();
  Eigen::VectorXd d(nm);
  d << op.wp, op.wq;
  const Eigen::VectorXd sq = d.cwiseSqrt();
  Eigen::MatrixXd a(nm, nm);
  for (Eigen::Index j = 0; j < nm; ++j)
    for (Eigen::Index i = 0; i < nm; ++i)
      a(i, j) = sq[i] * op.m(i, j) / sq[j];
  return a;
}

// Restriction of the conjugated matrix to the orthogonal complement of the
// weighted constant direction (1, -1), via a single Householder reflection.
Eigen::MatrixXd balanced_restriction(const OperatorMatrix& op) {
  const Eigen::Index n = op.wp.size();
  const Eigen::Index nm = op.m.rows();
  Eigen::MatrixXd a = conjugate_by_sqrt_weights(op);

  Eigen::VectorXd q(nm);
  q.head(n) = op.wp.cwiseSqrt();
  q.tail(nm - n) = -op.wq.cwiseSqrt();
  q /= q.norm();

  // Householder vector mapping q to -sign(q_0) e_0.
  Eigen::VectorXd v = q;
  v[0] += (q[0] >= 0.0 ? 1.0 : -1.0);
  const double vtv = v.squaredNorm();

  // B = H A H with H = I - 2 v v^T / (v^T v), via rank updates.
  const Eigen::VectorXd av = a * v;
  const Eigen::VectorXd va = a.transpose() * v;
  const double vav = v.dot(av);
  const double c = 2.0 / vtv;
  a.noalias() -= c * av * v.transpose();
  a.noalias() -= c * v * va.transpose();
  a.noalias() += (c * c * vav) * v * v.transpose();

  return a.bottomRightCorner(nm - 1, nm - 1);
}

std::pair<double, double> power_extremes(const Eigen::MatrixXd& sym) {
  const Eigen::Index n = sym.rows();
  const double shift = sym.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  // Dominant eigenvalue of sym + sigma*I gives alpha_plus, of sigma*I - sym
  // gives alpha_minus.
  const auto dominant = [&](double sigma, double sign) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = unif(rng);
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 10000; ++it) {
      Eigen::VectorXd y = sign * (sym * x) + sigma * x;
      const double norm = y.norm();
      if (norm == 0.0) return 0.0;
      y /= norm;
      const double next = y.dot(sign * (sym * y) + sigma * y);
      if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, std::abs(next))) {
        lambda = next;
        break;
      }
      lambda = next;
      x = y;
    }
    return lambda;
  };

  const double plus = dominant(shift, 1.0) - shift;
  const double minus = shift - dominant(shift, -1.0);
  return {minus, plus};
}

Eigen::MatrixXd assemble_from_mu(const Eigen::MatrixXd& mu,
                                 const Eigen::VectorXd& wp,
                                 const Eigen::VectorXd& wq, double ratio) {
  const Eigen::Index n = wp.size();
  const Eigen::Index m = wq.size();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(n + m, n + m);
  mat.noalias() -= ratio * mass_matrix(mu, wp, wq);

  // Left-compose with the projection: P = I + 0.5 * u v^T with
  // u = (1, -1), v = (-wp, wq).
  Eigen::VectorXd u(n + m), v(n + m);
  u.head(n).setOnes();
  u.tail(m).setConstant(-1.0);
  v.head(n) = -wp;
  v.tail(m) = wq;
  const Eigen::RowVectorXd vtm = v.transpose() * mat;
  mat.noalias() += 0.5 * u * vtm;
  return mat;
}

}  // namespace

ActiveSets active_sets(const DualPair& d, const CostMatrix& cost,
                       const DiscreteMeasure& p, const DiscreteMeasure& q) {
  ActiveSets s;
  s.mask = kernels::active_mask(cost.c(), d.f, d.g, 1e-14, s.tie_count);
  s.row_mass = kernels::weighted_row_sums(s.mask, q.weights());
  s.col_mass = kernels::weighted_col_sums(s.mask, p.weights());
  return s;
}

double lambda_measure(double a, double b) { return kernels::lambda_measure(a, b); }

Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& mu,
                            const Eigen::VectorXd& wp,
                            const Eigen::VectorXd& wq) {
  const Eigen::Index n = wp.size();
  const Eigen::Index m = wq.size();
  if (mu.rows() != n || mu.cols() != m)
    throw std::invalid_argument("mass_matrix: shape mismatch");
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n + m, n + m);
  const Eigen::VectorXd row_mass = kernels::weighted_row_sums(mu, wq);
  const Eigen::VectorXd col_mass = kernels::weighted_col_sums(mu, wp);
  for (Eigen::Index i = 0; i < n; ++i) mat(i, i) = row_mass[i];
  for (Eigen::Index j = 0; j < m; ++j) mat(n + j, n + j) = col_mass[j];
  for (Eigen::Index j = 0; j < m; ++j) {
    const double wqj = wq[j];
    for (Eigen::Index i = 0; i < n; ++i) {
      mat(i, n + j) = wqj * mu(i, j);
      mat(n + j, i) = wp[i] * mu(i, j);
    }
  }
  return mat;
}

Eigen::MatrixXd projection_matrix(const Eigen::VectorXd& wp,
                                  const Eigen::VectorXd& wq) {
  const Eigen::Index n = wp.size();
  const Eigen::Index m = wq.size();
  Eigen::VectorXd u(n + m), v(n + m);
  u.head(n).setOnes();
  u.tail(m).setConstant(-1.0);
  v.head(n) = -wp;
  v.tail(m) = wq;
  return Eigen::MatrixXd::Identity(n + m, n + m) + 0.5 * u * v.transpose();
}

OperatorMatrix assemble_L(const DualPair& dual_star, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, const CostMatrix& cost,
                          double eps, double eta) {
  const double resid = schrodinger_residual(dual_star, p, q, cost, eps);
  if (resid > 1e-6)
    std::cerr << "assemble_L: base point has first-order residual " << resid
              << "; the linearization is only meaningful at the optimum\n";
  const ActiveSets s = active_sets(dual_star, cost, p, q);
  OperatorMatrix op;
  op.wp = p.weights();
  op.wq = q.weights();
  op.kind = OperatorMatrix::Kind::L;
  op.m = assemble_from_mu(s.mask, op.wp, op.wq, eta / eps);
  return op;
}

OperatorMatrix assemble_Ln(const DualPair& dual_n, const DualPair& dual_star,
                           const DiscreteMeasure& p, const DiscreteMeasure& q,
                           const CostMatrix& cost, double eps, double eta) {
  if (dual_n.f.size() != dual_star.f.size() ||
      dual_n.g.size() != dual_star.g.size())
    throw std::invalid_argument("assemble_Ln: index sets do not match");
  const Eigen::MatrixXd mu = kernels::lambda_measure_matrix(
      cost.c(), dual_n.f, dual_n.g, dual_star.f, dual_star.g);
  OperatorMatrix op;
  op.wp = p.weights();
  op.wq = q.weights();
  op.kind = OperatorMatrix::Kind::Ln;
  op.m = assemble_from_mu(mu, op.wp, op.wq, eta / eps);
  return op;
}

OperatorMatrix operator_difference(const OperatorMatrix& a,
                                   const OperatorMatrix& b) {
  if (a.m.rows() != b.m.rows())
    throw std::invalid_argument("operator_difference: shape mismatch");
  OperatorMatrix diff;
  diff.m = a.m - b.m;
  diff.wp = a.wp;
  diff.wq = a.wq;
  diff.kind = OperatorMatrix::Kind::Diff;
  return diff;
}

DualPair apply_operator(const OperatorMatrix& op, const DualPair& d) {
  const Eigen::VectorXd out = op.m * stack(d);
  const Eigen::Index n = op.wp.size();
  return {out.head(n), out.tail(out.size() - n)};
}

double self_adjoint_defect(const OperatorMatrix& op) {
  const Eigen::MatrixXd c = balanced_restriction(op);
  return (c - c.transpose()).cwiseAbs().maxCoeff();
}

Spectrum operator_norm(const OperatorMatrix& op) {
  Eigen::MatrixXd c = balanced_restriction(op);
  const double defect = (c - c.transpose()).cwiseAbs().maxCoeff();
  if (defect > kDefectLimit)
    throw std::runtime_error(
        "operator_norm: restricted matrix asymmetry " + std::to_string(defect) +
        " exceeds 1e-8 (bug or non-converged base point)");
  const Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
  const auto [minus, plus] =
      detail::symmetric_extremes(sym, sym.rows() > kDenseEigLimit);
  return {std::max(std::abs(minus), std::abs(plus)), minus, plus};
}

namespace detail {

std::pair<double, double> symmetric_extremes(const Eigen::MatrixXd& sym,
                                             bool force_power) {
  if (sym.rows() == 0) return {0.0, 0.0};
  if (force_power) return power_extremes(sym);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace detail

}  // namespace qot
