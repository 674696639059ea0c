#ifndef BINDEBLUR_ORACLE_HPP
#define BINDEBLUR_ORACLE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bindeblur/spectral.hpp"

namespace bindeblur {

struct TooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hard cap on exhaustive enumeration: at most 2^25 matrices.
inline constexpr int kExhaustiveCellCap = 25;

/// The exact set of binary matrices whose banded spectrum matches the input
/// within tolerance. Gray-code enumeration with incremental spectrum
/// updates. Throws TooLarge beyond the cell cap.
std::vector<BinaryMatrix> brute_force_recover(const BandedSpectrum& spec,
                                              double tolerance = 1e-6);

struct AuditMode {
  bool exhaustive = true;
  long long sample_count = 0;   // pairs, for sampled mode
  std::uint64_t seed = 0;

  static AuditMode Exhaustive() { return AuditMode{}; }
  static AuditMode Sampled(long long count, std::uint64_t seed) {
    return AuditMode{false, count, seed};
  }
};

struct UniquenessAudit {
  int n1 = 0, n2 = 0;
  Band band;
  AuditMode mode;
  /// Pairs of distinct matrices with equal banded spectra. Complete in
  /// exhaustive mode.
  std::vector<std::pair<BinaryMatrix, BinaryMatrix>> collisions;
};

/// Hashes quantized banded spectra of all (or sampled pairs of) n1 x n2
/// binary matrices and reports indistinguishable pairs. Quantization grid
/// 1e-6; candidates are re-verified before being reported.
UniquenessAudit audit_uniqueness(int n1, int n2, const Band& band, const AuditMode& mode);

/// The indistinguishable pair of size p^alpha x p^alpha: checkerboards for
/// p = 2, stripes (ones on n+m = 1 resp. 0 mod p) for odd p. The two
/// spectra agree at every index with |k|, |l| < p^(alpha-1).
std::pair<BinaryMatrix, BinaryMatrix> counterexample_pair(int p, int alpha);

/// All matrices obtained from x by one interchange: a 2x2 minor swapped
/// between [[1,0],[0,1]] and [[0,1],[1,0]]. Every neighbor has the same row
/// and column sums as x.
std::vector<BinaryMatrix> interchange_neighbors(const BinaryMatrix& x);

/// S cells chosen uniformly at random without replacement.
BinaryMatrix random_binary_matrix(int n1, int n2, int popcount, std::uint64_t seed);

}  // namespace bindeblur

#endif
