#ifndef BINDEBLUR_FEASIBILITY_HPP
#define BINDEBLUR_FEASIBILITY_HPP

#include <cstdint>

#include <Eigen/Core>

#include "bindeblur/spectral.hpp"

namespace bindeblur {

/// A real-split linear equality system with per-variable integer bounds.
/// Complex constraints are stored as separate real and imaginary rows.
struct IntegerSystem {
  RealMatrix a;        // rows = constraints, cols = variables
  Eigen::VectorXd b;   // right-hand side, one entry per row
  Eigen::VectorXi lower;
  Eigen::VectorXi upper;

  int var_count() const { return static_cast<int>(a.cols()); }
  int row_count() const { return static_cast<int>(a.rows()); }

  /// Max-norm residual of an integer candidate over all rows.
  double residual(const Eigen::VectorXi& x) const;
  bool within_bounds(const Eigen::VectorXi& x) const;
};

struct SearchBudget {
  long long node_limit = 10'000'000;  // assignment attempts
  double tolerance = 1e-6;            // residual acceptance per row
};

enum class FeasibilityStatus { Found, Infeasible, BudgetExhausted };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Infeasible;
  Eigen::VectorXi x;          // valid when status == Found
  long long node_count = 0;
};

/// Depth-first branch and bound with interval-consistency propagation.
/// Branching picks the unfixed variable with the smallest remaining domain,
/// ties broken by the largest absolute constraint-coefficient sum. Every
/// returned vector satisfies the bounds exactly and each row within
/// budget.tolerance; Infeasible means the search space was exhausted.
FeasibilityResult solve_feasibility(const IntegerSystem& sys, const SearchBudget& budget);

}  // namespace bindeblur

#endif
