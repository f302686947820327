#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

namespace qot {

/// Finitely supported probability measure on R^d: pairwise distinct points,
/// strictly positive weights summing to one.
class DiscreteMeasure {
public:
  const Eigen::MatrixXd& points() const { return points_; }  // n x d
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }
  Eigen::Index dim() const { return points_.cols(); }

  /// Barycenter sum_i w_i x_i.
  Eigen::VectorXd mean() const;

private:
  friend DiscreteMeasure make_discrete(const Eigen::MatrixXd&,
                                       const Eigen::VectorXd&);
  DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
      : points_(std::move(points)), weights_(std::move(weights)) {}

  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
};

/// Builds a measure from raw (points, weights). Weights are renormalized to
/// sum one; zero-weight points are dropped; duplicate points are merged by
/// summing weights, keeping first-occurrence order.
/// Throws std::invalid_argument on empty input, size mismatch, negative
/// weights, all-zero weights, or non-finite data.
DiscreteMeasure make_discrete(const Eigen::MatrixXd& points,
                              const Eigen::VectorXd& weights);

/// 1-d convenience overload.
DiscreteMeasure make_discrete_1d(const std::vector<double>& points,
                                 const std::vector<double>& weights);

using Density1d = std::function<double(double)>;
using Density2d = std::function<double(double, double)>;

/// Trapezoid-rule discretization of a density on [a,b] with mesh step h:
/// nodes a, a+h, ..., b, weight coefficient h/2 at the ends and h inside,
/// multiplied by the density and renormalized. Zero-weight nodes are
/// dropped. Throws if the density is non-finite at a node or the mesh has
/// fewer than two nodes.
DiscreteMeasure trapezoid_grid(double a, double b, double h,
                               const Density1d& density);

/// Tensor-product trapezoid rule on [ax,bx] x [ay,by], same conventions.
DiscreteMeasure product_grid_2d(double ax, double bx, double ay, double by,
                                double h, const Density2d& density);

// Built-in densities. Support membership uses a small relative tolerance so
// mesh nodes landing exactly on a support boundary keep their weight.
Density1d uniform_density(double lo, double hi);
/// Normal(mu, sigma^2) restricted to [lo, hi] (mass renormalization is
/// subsumed by the grid constructors).
Density1d truncated_normal_density(double mu, double sigma, double lo,
                                   double hi);
/// Beta(a, b) on (0,1). Shape parameters below one make the density blow up
/// at an endpoint; a node lying within h/2 of such an endpoint is evaluated
/// h/2 inward instead, which keeps its weight finite.
Density1d beta_density(double a, double b, double grid_h);
Density2d uniform_density_2d(double ax, double bx, double ay, double by);

/// Precomputed quadratic costs c_ij = 0.5*|x_i - y_j|^2 for a marginal pair,
/// stored together with the transposed copy so both row-wise and column-wise
/// sweeps run over contiguous memory.
class CostMatrix {
public:
  const Eigen::MatrixXd& c() const { return c_; }    // n x m
  const Eigen::MatrixXd& ct() const { return ct_; }  // m x n
  Eigen::Index rows() const { return c_.rows(); }
  Eigen::Index cols() const { return c_.cols(); }
  double max_entry() const { return c_.maxCoeff(); }

private:
  friend CostMatrix cost_matrix(const DiscreteMeasure&,
                                const DiscreteMeasure&);
  CostMatrix() = default;
  Eigen::MatrixXd c_, ct_;
};

/// Fills the cost matrix for (P, Q). Throws on dimension mismatch.
CostMatrix cost_matrix(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// CSV persistence, header `x1,...,xd,weight`; the loader renormalizes.
DiscreteMeasure load_measure_csv(const std::string& path);
void save_measure_csv(const DiscreteMeasure& m, const std::string& path);

}  // namespace qot
