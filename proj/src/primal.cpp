#include "qot/primal.hpp"

#include <cmath>
#include <stdexcept>

#include "qot/csv.hpp"
#include "qot/kernels.hpp"

namespace qot {

namespace {

std::pair<double, double> residuals(const Eigen::MatrixXd& density,
                                    const DiscreteMeasure& p,
                                    const DiscreteMeasure& q) {
  const Eigen::ArrayXd row = kernels::weighted_row_sums(density, q.weights()).array() - 1.0;
  const Eigen::ArrayXd col = kernels::weighted_col_sums(density, p.weights()).array() - 1.0;
  const double rp = std::sqrt((p.weights().array() * row.square()).sum());
  const double rq = std::sqrt((q.weights().array() * col.square()).sum());
  return {rp, rq};
}

}  // namespace

Coupling coupling_density(const DualPair& d, const DiscreteMeasure& p,
                          const DiscreteMeasure& q, const CostMatrix& cost,
                          double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("coupling_density: eps must be > 0");
  Coupling c;
  c.density = kernels::plus_part_matrix(cost.c(), d.f, d.g, 1.0 / eps);
  std::tie(c.residual_p, c.residual_q) = residuals(c.density, p, q);
  return c;
}

std::pair<double, double> marginal_residual(const Coupling& c,
                                            const DiscreteMeasure& p,
                                            const DiscreteMeasure& q) {
  return residuals(c.density, p, q);
}

double support_fraction(const Coupling& c, const DiscreteMeasure& p,
                        const DiscreteMeasure& q) {
  double mass = 0.0;
  for (Eigen::Index j = 0; j < c.density.cols(); ++j) {
    const double wq = q.weights()[j];
    for (Eigen::Index i = 0; i < c.density.rows(); ++i)
      if (c.density(i, j) > 0.0) mass += p.weights()[i] * wq;
  }
  return mass;
}

double primal_objective(const Coupling& c, const DiscreteMeasure& p,
                        const DiscreteMeasure& q, const CostMatrix& cost,
                        double eps) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < c.density.cols(); ++j) {
    const double wq = q.weights()[j];
    double colsum = 0.0;
    for (Eigen::Index i = 0; i < c.density.rows(); ++i) {
      const double dv = c.density(i, j);
      if (dv == 0.0) continue;
      colsum += p.weights()[i] * dv * (cost.c()(i, j) + 0.5 * eps * dv);
    }
    total += wq * colsum;
  }
  return total;
}

double max_support_displacement(const Coupling& c, const DiscreteMeasure& p,
                                const DiscreteMeasure& q, double threshold) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < c.density.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.density.rows(); ++i) {
      if (c.density(i, j) <= threshold) continue;
      const double dist = (p.points().row(i) - q.points().row(j)).norm();
      if (dist > best) best = dist;
    }
  }
  return best;
}

void export_coupling_dense(const Coupling& c, const std::string& path) {
  csv::Writer out(path);
  std::vector<std::string> cells;
  cells.push_back("i");
  for (Eigen::Index j = 0; j < c.density.cols(); ++j)
    cells.push_back("j" + std::to_string(j));
  out.header(cells);
  for (Eigen::Index i = 0; i < c.density.rows(); ++i) {
    cells.clear();
    cells.push_back(std::to_string(i));
    for (Eigen::Index j = 0; j < c.density.cols(); ++j)
      cells.push_back(csv::fmt(c.density(i, j)));
    out.row(cells);
  }
  out.close();
}

void export_coupling_sparse(const Coupling& c, const DiscreteMeasure& p,
                            const DiscreteMeasure& q, const std::string& path,
                            double threshold) {
  csv::Writer out(path);
  const auto d = p.dim();
  std::vector<std::string> cells;
  cells = {"i", "j"};
  for (Eigen::Index k = 0; k < d; ++k) cells.push_back("x" + std::to_string(k + 1));
  for (Eigen::Index k = 0; k < d; ++k) cells.push_back("y" + std::to_string(k + 1));
  cells.push_back("density");
  out.header(cells);
  for (Eigen::Index i = 0; i < c.density.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.density.cols(); ++j) {
      if (c.density(i, j) <= threshold) continue;
      cells.clear();
      cells.push_back(std::to_string(i));
      cells.push_back(std::to_string(j));
      for (Eigen::Index k = 0; k < d; ++k) cells.push_back(csv::fmt(p.points()(i, k)));
      for (Eigen::Index k = 0; k < d; ++k) cells.push_back(csv::fmt(q.points()(j, k)));
      cells.push_back(csv::fmt(c.density(i, j)));
      out.row(cells);
    }
  }
  out.close();
}

}  // namespace qot
