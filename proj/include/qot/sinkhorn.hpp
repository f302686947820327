#pragma once

#include "qot/dual.hpp"
#include "qot/measures.hpp"
#include "qot/solver.hpp"

namespace qot {

// Entropic baseline, kept deliberately naive: the updates exponentiate
// (f - c)/eps without max-subtraction, so small eps overflows exactly the
// way a textbook implementation does. Do not "fix" this; the module exists
// to exhibit that behavior next to the stable quadratic solver.

enum class SinkhornStatus { converged, max_iters, numerically_failed };
std::string to_string(SinkhornStatus s);

/// One full iteration: g-update from f, then f-update from the new g.
/// May return non-finite values; run_sinkhorn turns that into a status.
DualPair sinkhorn_step(const DualPair& d, const DiscreteMeasure& p,
                       const DiscreteMeasure& q, const CostMatrix& cost,
                       double eps);

struct SinkhornResult {
  DualPair dual;
  SinkhornStatus status = SinkhornStatus::max_iters;
  long iterations = 0;
  SolveTrace trace;  // gamma column carries the entropic dual value
};

/// Iterates until the sup-norm step is <= tol, max_iters, or a non-finite
/// value appears.
SinkhornResult run_sinkhorn(const DiscreteMeasure& p, const DiscreteMeasure& q,
                            const CostMatrix& cost, double eps, long max_iters,
                            double tol);

/// Entropic dual objective sum wp f + sum wq g - eps * sum wp wq e^{(f+g-c)/eps}.
double entropic_dual_value(const DualPair& d, const DiscreteMeasure& p,
                           const DiscreteMeasure& q, const CostMatrix& cost,
                           double eps);

/// Weighted L2 feasibility defect of the entropic density e^{(f+g-c)/eps}.
std::pair<double, double> entropic_marginal_residual(const DualPair& d,
                                                     const DiscreteMeasure& p,
                                                     const DiscreteMeasure& q,
                                                     const CostMatrix& cost,
                                                     double eps);

}  // namespace qot
