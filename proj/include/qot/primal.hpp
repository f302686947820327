#pragma once

#include <string>

#include "qot/dual.hpp"
#include "qot/measures.hpp"

namespace qot {

/// Primal coupling as a density against P (x) Q, with feasibility residuals
/// computed at construction.
struct Coupling {
  Eigen::MatrixXd density;  // n x m, nonnegative
  double residual_p;        // weighted L2 norm of row-marginal defect
  double residual_q;        // weighted L2 norm of column-marginal defect
};

/// density(i,j) = (f_i + g_j - c_ij)_+ / eps.
Coupling coupling_density(const DualPair& d, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, const CostMatrix& cost,
                          double eps);

/// Weighted L2 norms of (sum_j wq_j density_ij - 1)_i and
/// (sum_i wp_i density_ij - 1)_j.
std::pair<double, double> marginal_residual(const Coupling& c,
                                            const DiscreteMeasure& p,
                                            const DiscreteMeasure& q);

/// P (x) Q mass of the strictly positive part of the density.
double support_fraction(const Coupling& c, const DiscreteMeasure& p,
                        const DiscreteMeasure& q);

/// sum_ij wp_i wq_j density_ij c_ij + eps/2 sum_ij wp_i wq_j density_ij^2.
double primal_objective(const Coupling& c, const DiscreteMeasure& p,
                        const DiscreteMeasure& q, const CostMatrix& cost,
                        double eps);

/// Largest |x - y| over pairs with density above `threshold`; the default
/// threshold guards pure roundoff. Returns 0 for an empty support.
double max_support_displacement(const Coupling& c, const DiscreteMeasure& p,
                                const DiscreteMeasure& q,
                                double threshold = 1e-12);

/// Dense export: row-major values with an `i\j` style header row of column
/// indices. Sparse export: rows `i,j,x_i,y_j,density` for entries above the
/// threshold.
void export_coupling_dense(const Coupling& c, const std::string& path);
void export_coupling_sparse(const Coupling& c, const DiscreteMeasure& p,
                            const DiscreteMeasure& q, const std::string& path,
                            double threshold = 1e-12);

}  // namespace qot
