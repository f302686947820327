#pragma once

#include <Eigen/Core>

namespace qot::kernels {

// Data-parallel inner loops shared by the solver, the primal extraction and
// the operator assembly. Every kernel exists twice: `serial::` is the
// reference implementation, the unqualified entry points run the OpenMP
// version. Both call the same per-row helpers, so outputs are bit-identical
// for any thread count (each output element has exactly one writer and a
// fixed inner summation order; scalar reductions combine per-row partial
// sums in index order).

/// c(i,j) = 0.5*|x_i - y_j|^2 for point rows of xp (n x d) and xq (m x d).
Eigen::MatrixXd cost_fill(const Eigen::MatrixXd& xp, const Eigen::MatrixXd& xq);

/// Per-row positive-part sums against Q:
///   row_pos[i] = sum_j wq_j (f_i + g_j - c_ij)_+
///   row_sq[i]  = sum_j wq_j (f_i + g_j - c_ij)_+^2
/// `ct` is the transposed cost (m x n) so row i reads contiguous memory.
void pos_sums_f(const Eigen::MatrixXd& ct, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wq,
                Eigen::VectorXd& row_pos, Eigen::VectorXd& row_sq);

/// Per-column positive-part sums against P:
///   col_pos[j] = sum_i wp_i (f_i + g_j - c_ij)_+
void pos_sums_g(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wp,
                Eigen::VectorXd& col_pos);

/// out(i,j) = scale * (f_i + g_j - c_ij)_+
Eigen::MatrixXd plus_part_matrix(const Eigen::MatrixXd& c,
                                 const Eigen::VectorXd& f,
                                 const Eigen::VectorXd& g, double scale);

/// Lebesgue measure of {lambda in [0,1] : lambda*b + (1-lambda)*a >= 0};
/// the integrand is affine in lambda so the interval is exact.
double lambda_measure(double a, double b);

/// mu(i,j) = lambda_measure(fn_i + gn_j - c_ij, fs_i + gs_j - c_ij).
Eigen::MatrixXd lambda_measure_matrix(const Eigen::MatrixXd& c,
                                      const Eigen::VectorXd& fn,
                                      const Eigen::VectorXd& gn,
                                      const Eigen::VectorXd& fs,
                                      const Eigen::VectorXd& gs);

/// Indicator of {f_i + g_j - c_ij >= 0} as a 0/1 matrix; `ties` counts
/// entries with |f_i + g_j - c_ij| <= tie_tol.
Eigen::MatrixXd active_mask(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g, double tie_tol,
                            long& ties);

/// row_out[i] = sum_j w_j mat(i,j)
Eigen::VectorXd weighted_row_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w);
/// col_out[j] = sum_i w_i mat(i,j)
Eigen::VectorXd weighted_col_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w);

/// Naive Sinkhorn half-steps (deliberately without max-subtraction).
///   g_j = -eps * log sum_i wp_i exp((f_i - c_ij)/eps)
Eigen::VectorXd sinkhorn_update_g(const Eigen::MatrixXd& c,
                                  const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& wp, double eps);
///   f_i = -eps * log sum_j wq_j exp((g_j - c_ij)/eps)
Eigen::VectorXd sinkhorn_update_f(const Eigen::MatrixXd& ct,
                                  const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& wq, double eps);

namespace serial {
Eigen::MatrixXd cost_fill(const Eigen::MatrixXd& xp, const Eigen::MatrixXd& xq);
void pos_sums_f(const Eigen::MatrixXd& ct, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wq,
                Eigen::VectorXd& row_pos, Eigen::VectorXd& row_sq);
void pos_sums_g(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wp,
                Eigen::VectorXd& col_pos);
Eigen::MatrixXd plus_part_matrix(const Eigen::MatrixXd& c,
                                 const Eigen::VectorXd& f,
                                 const Eigen::VectorXd& g, double scale);
Eigen::MatrixXd lambda_measure_matrix(const Eigen::MatrixXd& c,
                                      const Eigen::VectorXd& fn,
                                      const Eigen::VectorXd& gn,
                                      const Eigen::VectorXd& fs,
                                      const Eigen::VectorXd& gs);
Eigen::MatrixXd active_mask(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g, double tie_tol,
                            long& ties);
Eigen::VectorXd weighted_row_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w);
Eigen::VectorXd weighted_col_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w);
Eigen::VectorXd sinkhorn_update_g(const Eigen::MatrixXd& c,
                                  const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& wp, double eps);
Eigen::VectorXd sinkhorn_update_f(const Eigen::MatrixXd& ct,
                                  const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& wq, double eps);
}  // namespace serial

}  // namespace qot::kernels
