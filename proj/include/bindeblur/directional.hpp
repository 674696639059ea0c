#ifndef BINDEBLUR_DIRECTIONAL_HPP
#define BINDEBLUR_DIRECTIONAL_HPP

#include <stdexcept>
#include <vector>

#include "bindeblur/lattice.hpp"
#include "bindeblur/line_geometry.hpp"
#include "bindeblur/spectral.hpp"

namespace bindeblur {

struct UnstableCoarseSolve : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DirectionalKind { ExactSums, ConstraintBlock, SkippedRawCoefficients };

/// Per-direction integer data extracted from a banded spectrum.
struct DirectionalData {
  DirectionClass direction;
  DirectionalKind kind = DirectionalKind::SkippedRawCoefficients;

  /// ExactSums: line sums indexed by partition label 1..line_count.
  Eigen::VectorXi sums;

  /// ConstraintBlock: integer equality rows over the line-sum unknowns.
  /// Each row pins a within-coarse-class offset eta_j - eta_j' = rhs.
  RealMatrix constraint_rows;
  Eigen::VectorXd constraint_rhs;

  double residual = 0.0;
  double elapsed = 0.0;
};

/// Recovers the line sums of one direction class of a prime-dimension
/// square spectrum from its member coefficients plus the popcount, via the
/// lattice solver. Returns SkippedRawCoefficients when no acceptable short
/// vector is found.
DirectionalData recover_direction_sums(const BandedSpectrum& spec,
                                       const DirectionClass& dir,
                                       const SolverConfig& cfg);

/// For p^2 x p^2 spectra along one of the four axes (0,1), (1,0), (1,1),
/// (1,-1): first solves the p coarse sums from the k = p coefficient, then
/// the p^2 fine sums from the k < p coefficients plus the coarse
/// equalities. Throws UnstableCoarseSolve if the coarse solve is rejected.
DirectionalData recover_coarse_then_fine(const BandedSpectrum& spec, int p,
                                         IndexPair axis, const SolverConfig& cfg);

/// For p^2 x p^2 spectra and a non-axis direction: solves the member
/// coefficients without the popcount row for a short integer vector and
/// emits the within-coarse-class offset equalities the true line sums must
/// satisfy, plus the popcount row. Absolute values of the short vector are
/// not trusted, only pairwise differences inside a coarse class.
DirectionalData extract_constraint_block(const BandedSpectrum& spec, int p,
                                         const DirectionClass& dir,
                                         const SolverConfig& cfg);

}  // namespace bindeblur

#endif
