#ifndef BINDEBLUR_SRC_STACKED_LP_HPP
#define BINDEBLUR_SRC_STACKED_LP_HPP

#include "bindeblur/feasibility.hpp"

namespace bindeblur {

/// Integer-feasibility search for the large stacked reconstruction systems:
/// branch and bound over the cell variables with a bounded-variable phase-1
/// simplex deciding LP feasibility at every node. The LP relaxation of a
/// many-direction line-sum system is strong enough that the root is usually
/// already integral, where plain interval propagation needs astronomically
/// many nodes. Internal to the reconstruction layer; node_count reports
/// branch-and-bound nodes (LP solves).
FeasibilityResult solve_stacked_lp(const IntegerSystem& sys, const SearchBudget& budget);

}  // namespace bindeblur

#endif
