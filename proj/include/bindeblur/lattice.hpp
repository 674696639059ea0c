#ifndef BINDEBLUR_LATTICE_HPP
#define BINDEBLUR_LATTICE_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "bindeblur/feasibility.hpp"

namespace bindeblur {

struct DependentBasis : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An ordered list of linearly independent real vectors (columns).
struct LatticeBasis {
  RealMatrix vectors;  // one basis vector per column

  int dimension() const { return static_cast<int>(vectors.cols()); }
  int length() const { return static_cast<int>(vectors.rows()); }
};

struct SolverConfig {
  double beta = 1e8;            // embedding weight on constraint rows
  double epsilon = 0.001;       // max-norm shortness tolerance
  double delta = 0.75;          // Lovasz parameter
  double time_limit = 5.0;      // seconds per reduction
  double tracking_weight = 1.0; // weight on the multiplier-tracking row
  // Assumed absolute error in the right-hand sides. Zero means the data is
  // exact up to double rounding; the solver then scales the embedding so the
  // residual of the true solution and its unknown-block norm are balanced.
  double noise_floor = 0.0;
};

struct LllOptions {
  double delta = 0.75;
  double time_limit = 0.0;  // <= 0 means no limit
};

struct LllOutcome {
  LatticeBasis basis;
  bool timed_out = false;
};

/// LLL reduction: output spans the same lattice, satisfies size reduction
/// (|mu_ij| <= 1/2) and the Lovasz condition with the given delta. Throws
/// DependentBasis if the input vectors are dependent.
LatticeBasis lll_reduce(const LatticeBasis& basis, double delta);
LllOutcome lll_reduce(const LatticeBasis& basis, const LllOptions& options);

enum class LatticeSolveStatus { Found, NoShortVector, TimeLimit };

struct LatticeSolveResult {
  LatticeSolveStatus status = LatticeSolveStatus::NoShortVector;
  Eigen::VectorXi x;       // valid when status == Found
  double residual = 0.0;   // max-norm residual against the unscaled rows
};

/// Approximate integer-system solver through the embedding lattice
///   [ I | 0 ; beta*A | -beta*b ; 0 | gamma ]
/// whose short vectors with multiplier-tracking coordinate +-1 encode
/// integer candidates. Bounds in sys are ignored here; callers must
/// re-validate the candidate (residual, integrality, bounds).
LatticeSolveResult solve_integer_system(const IntegerSystem& sys, const SolverConfig& cfg);

}  // namespace bindeblur

#endif
