#include "qot/dual.hpp"

#include <cmath>
#include <stdexcept>

namespace qot {

DualPair constant_dual(const DiscreteMeasure& p, const DiscreteMeasure& q,
                       double value) {
  return {Eigen::VectorXd::Constant(p.size(), value),
          Eigen::VectorXd::Constant(q.size(), value)};
}

double balance_gap(const DualPair& d, const DiscreteMeasure& p,
                   const DiscreteMeasure& q) {
  return q.weights().dot(d.g) - p.weights().dot(d.f);
}

DualPair project_balanced(const DualPair& d, const DiscreteMeasure& p,
                          const DiscreteMeasure& q) {
  if (d.f.size() != p.size() || d.g.size() != q.size())
    throw std::invalid_argument("project_balanced: index sets do not match");
  if (!d.all_finite())
    throw std::invalid_argument("project_balanced: non-finite entries");
  const double s = balance_gap(d, p, q);
  return {d.f.array() + 0.5 * s, d.g.array() - 0.5 * s};
}

bool is_balanced(const DualPair& d, const DiscreteMeasure& p,
                 const DiscreteMeasure& q, double tol) {
  return std::abs(balance_gap(d, p, q)) <= tol;
}

double weighted_dot(const DualPair& a, const DualPair& b,
                    const DiscreteMeasure& p, const DiscreteMeasure& q) {
  return (p.weights().array() * a.f.array() * b.f.array()).sum() +
         (q.weights().array() * a.g.array() * b.g.array()).sum();
}

double weighted_norm(const DualPair& d, const DiscreteMeasure& p,
                     const DiscreteMeasure& q) {
  return std::sqrt(weighted_dot(d, d, p, q));
}

double delta_n(const DualPair& prev, const DualPair& cur,
               const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (prev.f.size() != cur.f.size() || prev.g.size() != cur.g.size())
    throw std::invalid_argument("delta_n: index sets do not match");
  const DualPair diff{cur.f - prev.f, cur.g - prev.g};
  return weighted_norm(diff, p, q);
}

double sup_distance(const DualPair& a, const DualPair& b) {
  const double df = (a.f - b.f).cwiseAbs().maxCoeff();
  const double dg = (a.g - b.g).cwiseAbs().maxCoeff();
  return std::max(df, dg);
}

}  // namespace qot
