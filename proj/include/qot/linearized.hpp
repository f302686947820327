#pragma once

#include "qot/dual.hpp"
#include "qot/measures.hpp"

namespace qot {

/// Sections of the contact set {f_i + g_j - c_ij >= 0} together with their
/// marginal masses. Ties (exact zeros up to 1e-14) are counted because
/// discrete marginals can charge section boundaries.
struct ActiveSets {
  Eigen::MatrixXd mask;      // n x m, entries 0 or 1
  Eigen::VectorXd row_mass;  // Q-mass of each row section
  Eigen::VectorXd col_mass;  // P-mass of each column section
  long tie_count = 0;
};

ActiveSets active_sets(const DualPair& d, const CostMatrix& cost,
                       const DiscreteMeasure& p, const DiscreteMeasure& q);

/// Finite-dimensional operator on stacked (f, g) coordinates with the
/// weighted inner product diag(wp, wq).
struct OperatorMatrix {
  enum class Kind { L, Ln, Diff };
  Eigen::MatrixXd m;  // (n+m) x (n+m)
  Eigen::VectorXd wp, wq;
  Kind kind = Kind::L;
};

/// Interval length {lambda in [0,1] : lambda*b + (1-lambda)*a >= 0}.
/// a is the iterate's slack f_n+g_n-c at one pair, b the optimum's.
double lambda_measure(double a, double b);

/// Mass operator (f,g) -> (f Q(S_.) + int_{S_.} g dQ ; g P(T_.) + int_{T_.} f dP)
/// as a matrix, for a 0/1 mask or an interpolation-measure matrix mu.
Eigen::MatrixXd mass_matrix(const Eigen::MatrixXd& mu,
                            const Eigen::VectorXd& wp,
                            const Eigen::VectorXd& wq);

/// Matrix of the orthogonal projection onto the balanced subspace.
Eigen::MatrixXd projection_matrix(const Eigen::VectorXd& wp,
                                  const Eigen::VectorXd& wq);

/// Linearization of the ascent step at the optimum:
/// proj o (I - (eta/eps) * mass_matrix(active set mask)).
/// Warns on stderr when dual_star is far from first-order optimality.
OperatorMatrix assemble_L(const DualPair& dual_star, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, const CostMatrix& cost,
                          double eps, double eta);

/// Exact step-transfer operator mapping the error at iterate n to the error
/// at n+1; same structure as assemble_L with the mask replaced by the
/// closed-form lambda-section measures.
OperatorMatrix assemble_Ln(const DualPair& dual_n, const DualPair& dual_star,
                           const DiscreteMeasure& p, const DiscreteMeasure& q,
                           const CostMatrix& cost, double eps, double eta);

OperatorMatrix operator_difference(const OperatorMatrix& a,
                                   const OperatorMatrix& b);

DualPair apply_operator(const OperatorMatrix& op, const DualPair& d);

struct Spectrum {
  double op_norm;      // max |eigenvalue| on the balanced subspace
  double alpha_minus;  // smallest eigenvalue of the restriction
  double alpha_plus;   // largest eigenvalue of the restriction
};

/// Restricts the operator to the balanced subspace (conjugation by
/// diag(w)^{1/2}, then one Householder reflection deflating the weighted
/// constant direction) and returns the extreme eigenvalues. Dense symmetric
/// eigendecomposition up to n+m = 4000, power iteration with tolerance
/// 1e-10 and a 10000-step cap above. Throws std::runtime_error when the
/// restricted matrix has asymmetry above 1e-8, which signals a bug or a
/// non-converged base point.
Spectrum operator_norm(const OperatorMatrix& op);

/// Max-abs asymmetry of the conjugated, deflated matrix; the operator is
/// self-adjoint on the balanced subspace, so this measures roundoff (or an
/// injected fault).
double self_adjoint_defect(const OperatorMatrix& op);

namespace detail {
/// Extreme eigenvalues of a symmetric matrix; `force_power` routes through
/// the power-iteration path so tests can compare it against the dense one.
std::pair<double, double> symmetric_extremes(const Eigen::MatrixXd& sym,
                                             bool force_power);
}  // namespace detail

}  // namespace qot
