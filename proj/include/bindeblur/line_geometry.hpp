#ifndef BINDEBLUR_LINE_GEOMETRY_HPP
#define BINDEBLUR_LINE_GEOMETRY_HPP

#include <stdexcept>
#include <vector>

#include "bindeblur/spectral.hpp"

namespace bindeblur {

struct ZeroDirection : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Partition of the N x N grid into the N periodic lines
/// k*m + l*n = j (mod N), j in [1, N], with 1-based m, n. The coefficient
/// X~_kl carries exactly the popcounts of these lines.
struct LinePartition {
  int n = 0;  // modulus
  int k = 0;
  int l = 0;

  /// Label in [1, n] of cell (m, n2), both 1-based.
  int label(int m, int n2) const {
    long long v = (static_cast<long long>(k) * m + static_cast<long long>(l) * n2) % n;
    int j = static_cast<int>((v + n) % n);
    return j == 0 ? n : j;
  }

  /// Cells (m, n2) carrying a given label.
  std::vector<IndexPair> cells_with_label(int j) const;
};

/// Throws ZeroDirection if (k, l) == (0, 0) mod n.
LinePartition line_partition(int n, int k, int l);

/// Slope equivalence of Eq-style relation: k*l' == k'*l (mod n).
bool slope_equivalent(int n, IndexPair a, IndexPair b);

/// One slope class of band coefficients.
struct DirectionClass {
  int k = 0, l = 0;                // canonical representative
  std::vector<IndexPair> members;  // free representatives, conjugates counted once
  int m_count = 0;                 // == members.size()
  int line_count = 0;              // labels per partition (= n)
  int line_capacity = 0;           // max ones per line (= cells per line)

  LinePartition partition() const { return LinePartition{line_count, k, l}; }
};

/// Partitions the non-DC indexes of a square band into at most n+1 slope
/// classes (n prime). Classes are ordered by descending m_count, with a
/// deterministic canonical-representative tie break.
std::vector<DirectionClass> canonical_directions(int n, const Band& band);

/// Direction classes for a p^alpha x p^alpha grid: primitive directions up
/// to unit multiples mod N. Coefficients p*(k0,l0) (both indexes divisible
/// by p) are not listed as members; they carry coarse information and are
/// consumed separately.
std::vector<DirectionClass> prime_power_directions(int p, int alpha, const Band& band);

/// Fine partition modulo N = p^alpha along (k, l), plus the coarse grouping
/// of fine labels by residue modulo p^(alpha-1). Vanishing sums of N-th
/// roots permit constant offsets only within a coarse group.
struct PrimePowerPartition {
  LinePartition fine;
  int coarse_modulus = 0;  // p^(alpha-1)
  /// Coarse group in [1, coarse_modulus] of a fine label.
  int coarse_of(int fine_label) const {
    int r = fine_label % coarse_modulus;
    return r == 0 ? coarse_modulus : r;
  }
};

PrimePowerPartition prime_power_partition(int p, int alpha, int k, int l);

/// Multiplier u with (member) == u * (canonical) mod n, requiring that the
/// canonical direction has an invertible component. Throws if no multiplier
/// exists.
int direction_multiplier(int n, IndexPair canonical, IndexPair member);

// Small modular helpers shared by the geometry and recovery code.
int mod_positive(long long v, int n);
int mod_inverse(int a, int n);  // throws std::invalid_argument if not invertible
bool is_prime(int n);
/// Returns (p, alpha) with n == p^alpha and p prime, or alpha == 0 if n is
/// not a prime power.
std::pair<int, int> prime_power_decompose(int n);

}  // namespace bindeblur

#endif
