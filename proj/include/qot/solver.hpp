#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qot/dual.hpp"
#include "qot/measures.hpp"

namespace qot {

/// Gradient-descent parameters. Step sizes above epsilon are allowed (the
/// break-point sweeps need them) but trigger a warning on stderr.
struct GdConfig {
  double epsilon = 0.1;
  double eta = 0.05;
  long max_iters = 100000;
  double tol = 1e-10;
  std::optional<DualPair> init;  // default: constant 0.5 on both marginals
  bool quiet = false;
};

enum class SolveStatus { converged, max_iters, diverged };
std::string to_string(SolveStatus s);

struct TraceRow {
  long n;
  double delta_n;        // weighted L2 step length
  double gamma;          // dual objective at iterate n
  double supnorm_step;   // sup-norm step length
  double seconds;        // wall time since solve start
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  SolveStatus status = SolveStatus::max_iters;

  /// Columns n,delta_n,gamma,supnorm_step,seconds. With include_timing off
  /// the seconds column is written as 0 so identical runs emit identical
  /// bytes.
  void save_csv(const std::string& path, bool include_timing = true) const;
};

struct SolveResult {
  DualPair dual;
  SolveTrace trace;
};

/// Dual objective: sum wp f + sum wq g - 1/(2 eps) sum wp wq (f+g-c)_+^2.
double dual_objective(const DualPair& d, const DiscreteMeasure& p,
                      const DiscreteMeasure& q, const CostMatrix& cost,
                      double eps);

/// Gradient with respect to the weighted inner product; the descent
/// direction at a node is not scaled by that node's weight, which keeps the
/// iteration mesh-independent.
DualPair dual_gradient(const DualPair& d, const DiscreteMeasure& p,
                       const DiscreteMeasure& q, const CostMatrix& cost,
                       double eps);

/// One ascent step: project_balanced(d + eta * gradient).
DualPair gd_step(const DualPair& d, const DiscreteMeasure& p,
                 const DiscreteMeasure& q, const CostMatrix& cost,
                 const GdConfig& cfg);

/// Weighted L2 norm of the stacked first-order-condition residuals
/// (eps - sum_j wq_j (f_i+g_j-c_ij)_+)_i and the symmetric column part;
/// equals eps times the gradient norm.
double schrodinger_residual(const DualPair& d, const DiscreteMeasure& p,
                            const DiscreteMeasure& q, const CostMatrix& cost,
                            double eps);

/// Iterates gd_step until delta_n <= tol, max_iters, or divergence
/// (non-finite values, or delta_n > 1e6 * max(delta_1, 1)). The observer,
/// when given, sees every iterate including the projected initial one.
using StepObserver = std::function<void(long n, const DualPair& iterate)>;
SolveResult solve(const DiscreteMeasure& p, const DiscreteMeasure& q,
                  const CostMatrix& cost, const GdConfig& cfg,
                  const StepObserver& observer = nullptr);

/// Gradient difference ratio |DGamma(a)-DGamma(b)| / |a-b| in the weighted
/// norm; bounded by 2/eps. Throws if a == b.
double lipschitz_witness(const DualPair& a, const DualPair& b,
                         const DiscreteMeasure& p, const DiscreteMeasure& q,
                         const CostMatrix& cost, double eps);

/// Potentials as CSV `index,value`, one file per marginal.
void save_dual_csv(const DualPair& d, const std::string& path_f,
                   const std::string& path_g);
DualPair load_dual_csv(const std::string& path_f, const std::string& path_g);

}  // namespace qot
