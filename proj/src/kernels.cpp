#include "qot/kernels.hpp"

#include <cmath>

namespace qot::kernels {

namespace detail {

// The per-element arithmetic lives in these helpers; serial and parallel
// drivers call the same code, which is what makes them bit-identical.

inline void cost_col(const Eigen::MatrixXd& xp, const Eigen::MatrixXd& xq,
                     Eigen::Index j, Eigen::MatrixXd& out) {
  const Eigen::Index n = xp.rows();
  const Eigen::Index d = xp.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double diff = xp(i, k) - xq(j, k);
      s += diff * diff;
    }
    out(i, j) = 0.5 * s;
  }
}

inline void pos_sums_f_row(const Eigen::MatrixXd& ct, const Eigen::VectorXd& f,
                           const Eigen::VectorXd& g, const Eigen::VectorXd& wq,
                           Eigen::Index i, Eigen::VectorXd& row_pos,
                           Eigen::VectorXd& row_sq) {
  const Eigen::Index m = g.size();
  const double fi = f[i];
  const double* cc = ct.col(i).data();
  double acc = 0.0, acc2 = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double t = fi + g[j] - cc[j];
    if (t > 0.0) {
      const double wt = wq[j] * t;
      acc += wt;
      acc2 += wt * t;
    }
  }
  row_pos[i] = acc;
  row_sq[i] = acc2;
}

inline void pos_sums_g_col(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                           const Eigen::VectorXd& g, const Eigen::VectorXd& wp,
                           Eigen::Index j, Eigen::VectorXd& col_pos) {
  const Eigen::Index n = f.size();
  const double gj = g[j];
  const double* cc = c.col(j).data();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = f[i] + gj - cc[i];
    if (t > 0.0) acc += wp[i] * t;
  }
  col_pos[j] = acc;
}

inline void plus_part_col(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                          const Eigen::VectorXd& g, double scale,
                          Eigen::Index j, Eigen::MatrixXd& out) {
  const Eigen::Index n = f.size();
  const double gj = g[j];
  const double* cc = c.col(j).data();
  double* oo = out.col(j).data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = f[i] + gj - cc[i];
    oo[i] = t > 0.0 ? scale * t : 0.0;
  }
}

inline void lambda_col(const Eigen::MatrixXd& c, const Eigen::VectorXd& fn,
                       const Eigen::VectorXd& gn, const Eigen::VectorXd& fs,
                       const Eigen::VectorXd& gs, Eigen::Index j,
                       Eigen::MatrixXd& out) {
  const Eigen::Index n = fn.size();
  const double gnj = gn[j];
  const double gsj = gs[j];
  const double* cc = c.col(j).data();
  double* oo = out.col(j).data();
  for (Eigen::Index i = 0; i < n; ++i) {
    oo[i] = lambda_measure(fn[i] + gnj - cc[i], fs[i] + gsj - cc[i]);
  }
}

inline long mask_col(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                     const Eigen::VectorXd& g, double tie_tol, Eigen::Index j,
                     Eigen::MatrixXd& out) {
  const Eigen::Index n = f.size();
  const double gj = g[j];
  const double* cc = c.col(j).data();
  double* oo = out.col(j).data();
  long ties = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = f[i] + gj - cc[i];
    oo[i] = t >= 0.0 ? 1.0 : 0.0;
    if (std::abs(t) <= tie_tol) ++ties;
  }
  return ties;
}

inline double row_dot(const Eigen::MatrixXd& mat, const Eigen::VectorXd& w,
                      Eigen::Index i) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < mat.cols(); ++j) acc += w[j] * mat(i, j);
  return acc;
}

inline double col_dot(const Eigen::MatrixXd& mat, const Eigen::VectorXd& w,
                      Eigen::Index j) {
  const double* cc = mat.col(j).data();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < mat.rows(); ++i) acc += w[i] * cc[i];
  return acc;
}

inline double sinkhorn_g_col(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                             const Eigen::VectorXd& wp, double eps,
                             Eigen::Index j) {
  const double* cc = c.col(j).data();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i)
    acc += wp[i] * std::exp((f[i] - cc[i]) / eps);
  return -eps * std::log(acc);
}

inline double sinkhorn_f_row(const Eigen::MatrixXd& ct, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& wq, double eps,
                             Eigen::Index i) {
  const double* cc = ct.col(i).data();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j)
    acc += wq[j] * std::exp((g[j] - cc[j]) / eps);
  return -eps * std::log(acc);
}

}  // namespace detail

double lambda_measure(double a, double b) {
  if (a >= 0.0) return b >= 0.0 ? 1.0 : a / (a - b);
  return b >= 0.0 ? b / (b - a) : 0.0;
}

// ---- OpenMP drivers --------------------------------------------------------

Eigen::MatrixXd cost_fill(const Eigen::MatrixXd& xp, const Eigen::MatrixXd& xq) {
  Eigen::MatrixXd out(xp.rows(), xq.rows());
  const Eigen::Index m = xq.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) detail::cost_col(xp, xq, j, out);
  return out;
}

void pos_sums_f(const Eigen::MatrixXd& ct, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wq,
                Eigen::VectorXd& row_pos, Eigen::VectorXd& row_sq) {
  const Eigen::Index n = f.size();
  row_pos.resize(n);
  row_sq.resize(n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i)
    detail::pos_sums_f_row(ct, f, g, wq, i, row_pos, row_sq);
}

void pos_sums_g(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wp,
                Eigen::VectorXd& col_pos) {
  const Eigen::Index m = g.size();
  col_pos.resize(m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j)
    detail::pos_sums_g_col(c, f, g, wp, j, col_pos);
}

Eigen::MatrixXd plus_part_matrix(const Eigen::MatrixXd& c,
                                 const Eigen::VectorXd& f,
                                 const Eigen::VectorXd& g, double scale) {
  Eigen::MatrixXd out(c.rows(), c.cols());
  const Eigen::Index m = c.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j)
    detail::plus_part_col(c, f, g, scale, j, out);
  return out;
}

Eigen::MatrixXd lambda_measure_matrix(const Eigen::MatrixXd& c,
                                      const Eigen::VectorXd& fn,
                                      const Eigen::VectorXd& gn,
                                      const Eigen::VectorXd& fs,
                                      const Eigen::VectorXd& gs) {
  Eigen::MatrixXd out(c.rows(), c.cols());
  const Eigen::Index m = c.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j)
    detail::lambda_col(c, fn, gn, fs, gs, j, out);
  return out;
}

Eigen::MatrixXd active_mask(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g, double tie_tol,
                            long& ties) {
  Eigen::MatrixXd out(c.rows(), c.cols());
  const Eigen::Index m = c.cols();
  long total = 0;
#pragma omp parallel for schedule(static) reduction(+ : total)
  for (Eigen::Index j = 0; j < m; ++j)
    total += detail::mask_col(c, f, g, tie_tol, j, out);
  ties = total;
  return out;
}

Eigen::VectorXd weighted_row_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w) {
  Eigen::VectorXd out(mat.rows());
  const Eigen::Index n = mat.rows();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) out[i] = detail::row_dot(mat, w, i);
  return out;
}

Eigen::VectorXd weighted_col_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w) {
  Eigen::VectorXd out(mat.cols());
  const Eigen::Index m = mat.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) out[j] = detail::col_dot(mat, w, j);
  return out;
}

Eigen::VectorXd sinkhorn_update_g(const Eigen::MatrixXd& c,
                                  const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& wp, double eps) {
  Eigen::VectorXd g(c.cols());
  const Eigen::Index m = c.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j)
    g[j] = detail::sinkhorn_g_col(c, f, wp, eps, j);
  return g;
}

Eigen::VectorXd sinkhorn_update_f(const Eigen::MatrixXd& ct,
                                  const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& wq, double eps) {
  Eigen::VectorXd f(ct.cols());
  const Eigen::Index n = ct.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i)
    f[i] = detail::sinkhorn_f_row(ct, g, wq, eps, i);
  return f;
}

// ---- Serial reference ------------------------------------------------------

namespace serial {

Eigen::MatrixXd cost_fill(const Eigen::MatrixXd& xp, const Eigen::MatrixXd& xq) {
  Eigen::MatrixXd out(xp.rows(), xq.rows());
  for (Eigen::Index j = 0; j < xq.rows(); ++j) detail::cost_col(xp, xq, j, out);
  return out;
}

void pos_sums_f(const Eigen::MatrixXd& ct, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wq,
                Eigen::VectorXd& row_pos, Eigen::VectorXd& row_sq) {
  row_pos.resize(f.size());
  row_sq.resize(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    detail::pos_sums_f_row(ct, f, g, wq, i, row_pos, row_sq);
}

void pos_sums_g(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                const Eigen::VectorXd& g, const Eigen::VectorXd& wp,
                Eigen::VectorXd& col_pos) {
  col_pos.resize(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j)
    detail::pos_sums_g_col(c, f, g, wp, j, col_pos);
}

Eigen::MatrixXd plus_part_matrix(const Eigen::MatrixXd& c,
                                 const Eigen::VectorXd& f,
                                 const Eigen::VectorXd& g, double scale) {
  Eigen::MatrixXd out(c.rows(), c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    detail::plus_part_col(c, f, g, scale, j, out);
  return out;
}

Eigen::MatrixXd lambda_measure_matrix(const Eigen::MatrixXd& c,
                                      const Eigen::VectorXd& fn,
                                      const Eigen::VectorXd& gn,
                                      const Eigen::VectorXd& fs,
                                      const Eigen::VectorXd& gs) {
  Eigen::MatrixXd out(c.rows(), c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    detail::lambda_col(c, fn, gn, fs, gs, j, out);
  return out;
}

Eigen::MatrixXd active_mask(const Eigen::MatrixXd& c, const Eigen::VectorXd& f,
                            const Eigen::VectorXd& g, double tie_tol,
                            long& ties) {
  Eigen::MatrixXd out(c.rows(), c.cols());
  long total = 0;
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    total += detail::mask_col(c, f, g, tie_tol, j, out);
  ties = total;
  return out;
}

Eigen::VectorXd weighted_row_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w) {
  Eigen::VectorXd out(mat.rows());
  for (Eigen::Index i = 0; i < mat.rows(); ++i)
    out[i] = detail::row_dot(mat, w, i);
  return out;
}

Eigen::VectorXd weighted_col_sums(const Eigen::MatrixXd& mat,
                                  const Eigen::VectorXd& w) {
  Eigen::VectorXd out(mat.cols());
  for (Eigen::Index j = 0; j < mat.cols(); ++j)
    out[j] = detail::col_dot(mat, w, j);
  return out;
}

Eigen::VectorXd sinkhorn_update_g(const Eigen::MatrixXd& c,
                                  const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& wp, double eps) {
  Eigen::VectorXd g(c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    g[j] = detail::sinkhorn_g_col(c, f, wp, eps, j);
  return g;
}

Eigen::VectorXd sinkhorn_update_f(const Eigen::MatrixXd& ct,
                                  const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& wq, double eps) {
  Eigen::VectorXd f(ct.cols());
  for (Eigen::Index i = 0; i < ct.cols(); ++i)
    f[i] = detail::sinkhorn_f_row(ct, g, wq, eps, i);
  return f;
}

}  // namespace serial

}  // namespace qot::kernels
