#include "qot/sinkhorn.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "qot/kernels.hpp"

namespace qot {

namespace {

Eigen::MatrixXd entropic_density(const DualPair& d, const CostMatrix& cost,
                                 double eps) {
  Eigen::MatrixXd dens(cost.rows(), cost.cols());
  for (Eigen::Index j = 0; j < cost.cols(); ++j)
    for (Eigen::Index i = 0; i < cost.rows(); ++i)
      dens(i, j) = std::exp((d.f[i] + d.g[j] - cost.c()(i, j)) / eps);
  return dens;
}

}  // namespace

std::string to_string(SinkhornStatus s) {
  switch (s) {
    case SinkhornStatus::converged: return "converged";
    case SinkhornStatus::max_iters: return "max_iters";
    case SinkhornStatus::numerically_failed: return "numerically_failed";
  }
  return "unknown";
}

DualPair sinkhorn_step(const DualPair& d, const DiscreteMeasure& p,
                       const DiscreteMeasure& q, const CostMatrix& cost,
                       double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("sinkhorn_step: eps must be > 0");
  DualPair next;
  next.g = kernels::sinkhorn_update_g(cost.c(), d.f, p.weights(), eps);
  next.f = kernels::sinkhorn_update_f(cost.ct(), next.g, q.weights(), eps);
  return next;
}

SinkhornResult run_sinkhorn(const DiscreteMeasure& p, const DiscreteMeasure& q,
                            const CostMatrix& cost, double eps, long max_iters,
                            double tol) {
  if (max_iters < 1) throw std::invalid_argument("run_sinkhorn: max_iters >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("run_sinkhorn: tol must be > 0");

  SinkhornResult res;
  DualPair cur = constant_dual(p, q, 0.0);
  const auto t0 = std::chrono::steady_clock::now();

  for (long n = 1; n <= max_iters; ++n) {
    const DualPair next = sinkhorn_step(cur, p, q, cost, eps);
    res.iterations = n;
    if (!next.all_finite()) {
      res.status = SinkhornStatus::numerically_failed;
      res.dual = next;
      return res;
    }
    const double step = sup_distance(cur, next);
    const double delta = delta_n(cur, next, p, q);
    const double value = entropic_dual_value(next, p, q, cost, eps);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    res.trace.rows.push_back({n, delta, value, step, secs});
    cur = next;
    if (!std::isfinite(value)) {
      res.status = SinkhornStatus::numerically_failed;
      break;
    }
    if (step <= tol) {
      res.status = SinkhornStatus::converged;
      break;
    }
  }
  res.dual = std::move(cur);
  if (res.status == SinkhornStatus::converged)
    res.trace.status = SolveStatus::converged;
  return res;
}

double entropic_dual_value(const DualPair& d, const DiscreteMeasure& p,
                           const DiscreteMeasure& q, const CostMatrix& cost,
                           double eps) {
  const Eigen::MatrixXd dens = entropic_density(d, cost, eps);
  const double mass =
      p.weights().dot(dens * q.weights());
  return p.weights().dot(d.f) + q.weights().dot(d.g) - eps * mass;
}

std::pair<double, double> entropic_marginal_residual(const DualPair& d,
                                                     const DiscreteMeasure& p,
                                                     const DiscreteMeasure& q,
                                                     const CostMatrix& cost,
                                                     double eps) {
  const Eigen::MatrixXd dens = entropic_density(d, cost, eps);
  const Eigen::ArrayXd row = (dens * q.weights()).array() - 1.0;
  const Eigen::ArrayXd col = (dens.transpose() * p.weights()).array() - 1.0;
  const double rp = std::sqrt((p.weights().array() * row.square()).sum());
  const double rq = std::sqrt((q.weights().array() * col.square()).sum());
  return {rp, rq};
}

}  // namespace qot
