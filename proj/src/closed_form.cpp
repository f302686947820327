#include "qot/closed_form.hpp"

#include <limits>
#include <stdexcept>

namespace qot {

FullSupportCheck full_support_check(const DiscreteMeasure& p,
                                    const DiscreteMeasure& q, double eps) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("full_support_check: dimension mismatch");
  if (!(eps > 0.0))
    throw std::invalid_argument("full_support_check: eps must be > 0");

  const Eigen::VectorXd pm = p.mean();
  const Eigen::VectorXd qm = q.mean();
  const double pq = pm.dot(qm);
  const Eigen::VectorXd qx = p.points() * qm;  // <q, x_i>
  const Eigen::VectorXd py = q.points() * pm;  // <p, y_j>

  double margin = std::numeric_limits<double>::infinity();
  Eigen::VectorXd xy(p.size());
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    xy.noalias() = p.points() * q.points().row(j).transpose();
    const double m =
        (eps + pq - py[j] + (xy - qx).array()).minCoeff();
    if (m < margin) margin = m;
  }
  return {margin >= 0.0, margin};
}

DualPair full_support_potentials(const DiscreteMeasure& p,
                                 const DiscreteMeasure& q, double eps) {
  const auto check = full_support_check(p, q, eps);
  if (!check.full_support)
    throw std::invalid_argument(
        "full_support_potentials: full-support condition fails (margin " +
        std::to_string(check.margin) + ")");

  const Eigen::VectorXd pm = p.mean();
  const Eigen::VectorXd qm = q.mean();
  const double shift = 0.5 * (eps + pm.dot(qm));

  DualPair d;
  d.f = 0.5 * p.points().rowwise().squaredNorm().array() -
        (p.points() * qm).array() + shift;
  d.g = 0.5 * q.points().rowwise().squaredNorm().array() -
        (q.points() * pm).array() + shift;
  return project_balanced(d, p, q);
}

}  // namespace qot
