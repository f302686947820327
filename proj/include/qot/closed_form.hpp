#pragma once

#include "qot/dual.hpp"
#include "qot/measures.hpp"

namespace qot {

struct FullSupportCheck {
  bool full_support;  // true iff the optimal coupling charges every pair
  double margin;      // min over pairs of eps + p.q - q.x - p.y + <x,y>
};

/// Tests the regime where the coupling has full support and the potentials
/// are explicit. The margin lets sweeps bracket the epsilon at which the
/// regime changes.
FullSupportCheck full_support_check(const DiscreteMeasure& p,
                                    const DiscreteMeasure& q, double eps);

/// Explicit potentials f_i = |x_i|^2/2 - <q,x_i> + (eps + p.q)/2 (and
/// symmetrically for g), returned balanced. Throws if the full-support
/// condition fails, because the formula is invalid there.
DualPair full_support_potentials(const DiscreteMeasure& p,
                                 const DiscreteMeasure& q, double eps);

}  // namespace qot
