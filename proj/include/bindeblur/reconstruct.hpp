#ifndef BINDEBLUR_RECONSTRUCT_HPP
#define BINDEBLUR_RECONSTRUCT_HPP

#include <string>
#include <vector>

#include "bindeblur/directional.hpp"
#include "bindeblur/feasibility.hpp"

namespace bindeblur {

struct UnsupportedDims : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RecoveryStatus { Recovered, Inconsistent, BudgetExhausted };

struct DirectionOutcome {
  DirectionClass direction;
  DirectionalKind kind = DirectionalKind::SkippedRawCoefficients;
  double residual = 0.0;
  double elapsed = 0.0;
};

struct RecoveryReport {
  RecoveryStatus status = RecoveryStatus::Inconsistent;
  BinaryMatrix matrix;  // valid when status == Recovered
  std::vector<DirectionOutcome> per_direction;
  long long stacked_node_count = 0;
  double total_elapsed = 0.0;
  int retries_used = 0;
};

struct RecoveryOptions {
  /// On an inconsistent stacked solve, drop recovered directions by
  /// descending solve residual and retry, at most max_retries times.
  bool retry_directions = false;
  int max_retries = 0;  // 0 with retry_directions => one retry per recovered direction
};

/// Minimal band guaranteeing uniqueness for the supported dimension shapes:
/// distinct primes -> the four-coefficient set; square prime N -> square
/// band floor(sqrt(N)); square p^alpha -> square band p^(alpha-1).
/// Throws UnsupportedDims otherwise.
Band minimal_band(int n1, int n2);

/// Rectangular distinct-prime recovery: column sums, row sums, then the
/// stacked binary system.
RecoveryReport recover_rect(const BandedSpectrum& spec, const SearchBudget& budget,
                            const RecoveryOptions& options = {});

/// Square prime-dimension recovery: per-direction line sums via the lattice
/// solver, then the stacked binary system.
RecoveryReport recover_square_prime(const BandedSpectrum& spec, const SolverConfig& cfg,
                                    const SearchBudget& budget,
                                    const RecoveryOptions& options = {});

/// Square p^2 recovery: coarse-then-fine sums along the four axes,
/// constraint blocks elsewhere, then the stacked binary system.
RecoveryReport recover_prime_power(const BandedSpectrum& spec, const SolverConfig& cfg,
                                   const SearchBudget& budget,
                                   const RecoveryOptions& options = {});

/// Dispatches on the dimension shape. Throws UnsupportedDims.
RecoveryReport recover(const BandedSpectrum& spec, const SolverConfig& cfg,
                       const SearchBudget& budget, const RecoveryOptions& options = {});

}  // namespace bindeblur

#endif
