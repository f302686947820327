#pragma once

#include <Eigen/Core>

#include "qot/measures.hpp"

namespace qot {

/// Potential values on the supports of P and Q; the state of the dual
/// iteration.
struct DualPair {
  Eigen::VectorXd f;  // indexed like P's points
  Eigen::VectorXd g;  // indexed like Q's points

  bool all_finite() const { return f.allFinite() && g.allFinite(); }
};

/// Constant potentials f = g = value, sized for (P, Q).
DualPair constant_dual(const DiscreteMeasure& p, const DiscreteMeasure& q,
                       double value);

/// Gap s = sum_j wq_j g_j - sum_i wp_i f_i; zero exactly when the pair lies
/// in the balanced subspace.
double balance_gap(const DualPair& d, const DiscreteMeasure& p,
                   const DiscreteMeasure& q);

/// Orthogonal projection onto the balanced subspace (equal weighted means):
/// f += s/2, g -= s/2. Idempotent. Throws on non-finite input.
DualPair project_balanced(const DualPair& d, const DiscreteMeasure& p,
                          const DiscreteMeasure& q);

bool is_balanced(const DualPair& d, const DiscreteMeasure& p,
                 const DiscreteMeasure& q, double tol = 1e-10);

/// Weighted inner product <a,b> = sum_i wp_i a.f_i b.f_i + sum_j wq_j a.g_j b.g_j.
double weighted_dot(const DualPair& a, const DualPair& b,
                    const DiscreteMeasure& p, const DiscreteMeasure& q);

/// Weighted L2 norm of the pair.
double weighted_norm(const DualPair& d, const DiscreteMeasure& p,
                     const DiscreteMeasure& q);

/// Weighted L2 distance between consecutive iterates.
double delta_n(const DualPair& prev, const DualPair& cur,
               const DiscreteMeasure& p, const DiscreteMeasure& q);

/// Sup-norm distance max(|f_a - f_b|_inf, |g_a - g_b|_inf).
double sup_distance(const DualPair& a, const DualPair& b);

}  // namespace qot
