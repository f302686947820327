#include "qot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qot/csv.hpp"
#include "qot/kernels.hpp"

namespace qot {

namespace {

constexpr double kSupportTol = 1e-9;  // relative slack for boundary nodes

std::vector<double> point_key(const Eigen::MatrixXd& pts, Eigen::Index i) {
  std::vector<double> key(pts.cols());
  for (Eigen::Index k = 0; k < pts.cols(); ++k) key[k] = pts(i, k);
  return key;
}

}  // namespace

Eigen::VectorXd DiscreteMeasure::mean() const {
  return points_.transpose() * weights_;
}

DiscreteMeasure make_discrete(const Eigen::MatrixXd& points,
                              const Eigen::VectorXd& weights) {
  if (points.rows() == 0) throw std::invalid_argument("measure: empty input");
  if (points.rows() != weights.size())
    throw std::invalid_argument("measure: points/weights size mismatch");
  if (!points.allFinite() || !weights.allFinite())
    throw std::invalid_argument("measure: non-finite input");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("measure: negative weight");

  // Merge duplicates, first occurrence wins the ordering.
  std::map<std::vector<double>, Eigen::Index> seen;
  std::vector<Eigen::Index> order;
  std::vector<double> mass;
  order.reserve(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    auto key = point_key(points, i);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(std::move(key), static_cast<Eigen::Index>(order.size()));
      order.push_back(i);
      mass.push_back(weights[i]);
    } else {
      mass[it->second] += weights[i];
    }
  }

  double total = 0.0;
  for (double w : mass) total += w;
  if (total <= 0.0)
    throw std::invalid_argument("measure: weights sum to zero");

  Eigen::Index n = 0;
  for (double w : mass)
    if (w > 0.0) ++n;
  if (n == 0) throw std::invalid_argument("measure: weights sum to zero");

  Eigen::MatrixXd pts(n, points.cols());
  Eigen::VectorXd w(n);
  Eigen::Index out = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    if (mass[k] <= 0.0) continue;
    pts.row(out) = points.row(order[k]);
    w[out] = mass[k] / total;
    ++out;
  }
  // One renormalization pass is exact enough: |sum - 1| stays below 1e-12.
  w /= w.sum();
  return DiscreteMeasure(std::move(pts), std::move(w));
}

DiscreteMeasure make_discrete_1d(const std::vector<double>& points,
                                 const std::vector<double>& weights) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(points.size()), 1);
  Eigen::VectorXd w(static_cast<Eigen::Index>(weights.size()));
  for (size_t i = 0; i < points.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = points[i];
  for (size_t i = 0; i < weights.size(); ++i) w[static_cast<Eigen::Index>(i)] = weights[i];
  return make_discrete(pts, w);
}

DiscreteMeasure trapezoid_grid(double a, double b, double h,
                               const Density1d& density) {
  if (!(a < b)) throw std::invalid_argument("trapezoid_grid: need a < b");
  if (!(h > 0.0) || h > b - a)
    throw std::invalid_argument("trapezoid_grid: need 0 < h <= b-a");
  const auto n = static_cast<Eigen::Index>(std::llround((b - a) / h));
  if (n < 1) throw std::invalid_argument("trapezoid_grid: fewer than 2 nodes");

  Eigen::MatrixXd pts(n + 1, 1);
  Eigen::VectorXd w(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) {
    const double x = (i == n) ? b : a + static_cast<double>(i) * (b - a) / static_cast<double>(n);
    const double coeff = (i == 0 || i == n) ? 0.5 : 1.0;
    const double d = density(x);
    if (!std::isfinite(d) || d < 0.0)
      throw std::invalid_argument("trapezoid_grid: density not finite/nonnegative at node");
    pts(i, 0) = x;
    w[i] = coeff * h * d;
  }
  return make_discrete(pts, w);
}

DiscreteMeasure product_grid_2d(double ax, double bx, double ay, double by,
                                double h, const Density2d& density) {
  if (!(ax < bx) || !(ay < by))
    throw std::invalid_argument("product_grid_2d: degenerate rectangle");
  if (!(h > 0.0)) throw std::invalid_argument("product_grid_2d: need h > 0");
  const auto nx = static_cast<Eigen::Index>(std::llround((bx - ax) / h));
  const auto ny = static_cast<Eigen::Index>(std::llround((by - ay) / h));
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("product_grid_2d: fewer than 2 nodes per axis");

  Eigen::MatrixXd pts((nx + 1) * (ny + 1), 2);
  Eigen::VectorXd w((nx + 1) * (ny + 1));
  Eigen::Index out = 0;
  for (Eigen::Index i = 0; i <= nx; ++i) {
    const double x = (i == nx) ? bx : ax + static_cast<double>(i) * (bx - ax) / static_cast<double>(nx);
    const double cx = (i == 0 || i == nx) ? 0.5 : 1.0;
    for (Eigen::Index j = 0; j <= ny; ++j) {
      const double y = (j == ny) ? by : ay + static_cast<double>(j) * (by - ay) / static_cast<double>(ny);
      const double cy = (j == 0 || j == ny) ? 0.5 : 1.0;
      const double d = density(x, y);
      if (!std::isfinite(d) || d < 0.0)
        throw std::invalid_argument("product_grid_2d: density not finite/nonnegative at node");
      pts(out, 0) = x;
      pts(out, 1) = y;
      w[out] = cx * cy * h * h * d;
      ++out;
    }
  }
  return make_discrete(pts, w);
}

Density1d uniform_density(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("uniform: need lo < hi");
  const double tol = kSupportTol * std::max(1.0, std::abs(hi - lo));
  const double val = 1.0 / (hi - lo);
  return [=](double x) { return (x >= lo - tol && x <= hi + tol) ? val : 0.0; };
}

Density1d truncated_normal_density(double mu, double sigma, double lo,
                                   double hi) {
  if (!(sigma > 0.0)) throw std::invalid_argument("truncnormal: need sigma > 0");
  if (!(lo < hi)) throw std::invalid_argument("truncnormal: need lo < hi");
  const double tol = kSupportTol * std::max(1.0, std::abs(hi - lo));
  return [=](double x) {
    if (x < lo - tol || x > hi + tol) return 0.0;
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z);
  };
}

Density1d beta_density(double a, double b, double grid_h) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("beta: need positive shape parameters");
  if (!(grid_h > 0.0)) throw std::invalid_argument("beta: need grid_h > 0");
  const double shift = grid_h / 2.0;
  return [=](double x) {
    if (x < -kSupportTol || x > 1.0 + kSupportTol) return 0.0;
    double t = x;
    if (a < 1.0 && t < shift) t = shift;
    if (b < 1.0 && t > 1.0 - shift) t = 1.0 - shift;
    return std::pow(t, a - 1.0) * std::pow(1.0 - t, b - 1.0) / std::beta(a, b);
  };
}

Density2d uniform_density_2d(double ax, double bx, double ay, double by) {
  if (!(ax < bx) || !(ay < by))
    throw std::invalid_argument("uniform2d: degenerate rectangle");
  const double tolx = kSupportTol * std::max(1.0, std::abs(bx - ax));
  const double toly = kSupportTol * std::max(1.0, std::abs(by - ay));
  const double val = 1.0 / ((bx - ax) * (by - ay));
  return [=](double x, double y) {
    return (x >= ax - tolx && x <= bx + tolx && y >= ay - toly && y <= by + toly) ? val : 0.0;
  };
}

CostMatrix cost_matrix(const DiscreteMeasure& p, const DiscreteMeasure& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("cost_matrix: dimension mismatch");
  CostMatrix cm;
  cm.c_ = kernels::cost_fill(p.points(), q.points());
  cm.ct_ = kernels::cost_fill(q.points(), p.points());
  return cm;
}

DiscreteMeasure load_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const auto ncols = static_cast<Eigen::Index>(
      std::count(line.begin(), line.end(), ',') + 1);
  if (ncols < 2) throw std::runtime_error(path + ": need x1,...,xd,weight header");
  const Eigen::Index d = ncols - 1;

  std::vector<double> vals;
  Eigen::Index nrows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index got = 0;
    while (std::getline(ss, cell, ',')) {
      vals.push_back(std::stod(cell));
      ++got;
    }
    if (got != ncols) throw std::runtime_error(path + ": ragged row");
    ++nrows;
  }
  if (nrows == 0) throw std::runtime_error(path + ": no data rows");

  Eigen::MatrixXd pts(nrows, d);
  Eigen::VectorXd w(nrows);
  for (Eigen::Index i = 0; i < nrows; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) pts(i, k) = vals[i * ncols + k];
    w[i] = vals[i * ncols + d];
  }
  return make_discrete(pts, w);
}

void save_measure_csv(const DiscreteMeasure& m, const std::string& path) {
  csv::Writer out(path);
  std::vector<std::string> cells;
  for (Eigen::Index k = 0; k < m.dim(); ++k)
    cells.push_back("x" + std::to_string(k + 1));
  cells.push_back("weight");
  out.header(cells);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    cells.clear();
    for (Eigen::Index k = 0; k < m.dim(); ++k)
      cells.push_back(csv::fmt(m.points()(i, k)));
    cells.push_back(csv::fmt(m.weights()[i]));
    out.row(cells);
  }
  out.close();
}

}  // namespace qot
