#pragma once

#include "qot/solver.hpp"

namespace qot {

/// Geometric-rate estimate from the tail of a trace: least-squares slope of
/// log(delta_n) over the last `window` iterations, delta_star_hat = exp(slope).
struct RateEstimate {
  double delta_star_hat = 0.0;
  double r_squared = 0.0;
  int window = 0;       // number of tail points used (10 unless the trace is shorter)
  long n_converged = 0;  // iteration index of the last trace row
  long n0 = 0;           // burn-in proxy: first index from which the local
                         // slope stays within 5% of the final slope
};

/// Throws if the trace has fewer than 3 rows. If any delta in the fit
/// window is exactly 0 the rate is reported as 0 by convention.
RateEstimate estimate_rate(const SolveTrace& trace);

}  // namespace qot
