#ifndef BINDEBLUR_SPECTRAL_HPP
#define BINDEBLUR_SPECTRAL_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace bindeblur {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using IntMatrix = Eigen::MatrixXi;
using IndexPair = std::pair<int, int>;

/// Tolerance used when validating Hermitian symmetry and integrality of
/// externally supplied spectra.
inline constexpr double kSymmetryTolerance = 1e-6;

struct IncompleteBand : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BandOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidSpectrum : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lowest/highest frequency index carried for a dimension of size n.
/// Odd n uses the symmetric range [-(n-1)/2, (n-1)/2]; even n uses
/// [-n/2+1, n/2].
inline int frequency_low(int n) { return (n % 2 != 0) ? -(n - 1) / 2 : -n / 2 + 1; }
inline int frequency_high(int n) { return (n % 2 != 0) ? (n - 1) / 2 : n / 2; }

/// A 0/1 matrix. Spatial indices are 1-based in all frequency-domain
/// formulas; storage is the usual 0-based Eigen layout.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(int n1, int n2) : bits_(IntMatrix::Zero(n1, n2)) {}
  explicit BinaryMatrix(IntMatrix bits);

  int n1() const { return static_cast<int>(bits_.rows()); }
  int n2() const { return static_cast<int>(bits_.cols()); }
  int popcount() const { return bits_.sum(); }

  /// 1-based access matching the transform conventions.
  int at(int m, int n) const { return bits_(m - 1, n - 1); }
  void set(int m, int n, int value);

  const IntMatrix& bits() const { return bits_; }
  IntMatrix& bits() { return bits_; }

  bool operator==(const BinaryMatrix& other) const { return bits_ == other.bits_; }
  bool operator!=(const BinaryMatrix& other) const { return !(*this == other); }

 private:
  IntMatrix bits_;
};

/// An explicit set of frequency indices (k, l). Conjugate pairs always
/// travel together and (0,0) is always present.
class Band {
 public:
  Band() = default;
  explicit Band(std::vector<IndexPair> indexes);

  /// All indices within the full frequency ranges of an n1 x n2 matrix.
  static Band full(int n1, int n2);
  /// Square band max(|k|, |l|) <= limit.
  static Band square(int limit);
  /// The four-coefficient set {(0,0), (0,+-1), (+-1,0), (1,1), (-1,-1)}.
  static Band rect4();

  bool contains(int k, int l) const;
  std::size_t size() const { return indexes_.size(); }
  const std::vector<IndexPair>& indexes() const { return indexes_; }

  /// One representative per conjugate pair: (k, l) with k > 0, or k == 0
  /// and l >= 0. Includes (0, 0).
  std::vector<IndexPair> free_representatives() const;

  bool is_subset_of(const Band& other) const;

 private:
  std::vector<IndexPair> indexes_;  // sorted, unique
};

/// Complex DFT coefficients of an n1 x n2 binary matrix restricted to a band.
class BandedSpectrum {
 public:
  BandedSpectrum() = default;
  BandedSpectrum(int n1, int n2, Band band, std::vector<Complex> values);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  const Band& band() const { return band_; }
  const std::vector<Complex>& values() const { return values_; }

  Complex value(int k, int l) const;
  bool has(int k, int l) const { return band_.contains(k, l); }

  /// Nearest integer to the DC coefficient (the global popcount).
  int popcount() const;

  /// Checks Hermitian symmetry and DC integrality within tolerance.
  /// Throws InvalidSpectrum on violation.
  void validate(double tolerance = kSymmetryTolerance) const;

 private:
  int n1_ = 0, n2_ = 0;
  Band band_;
  std::vector<Complex> values_;  // aligned with band_.indexes()
};

/// Full-band forward transform, X~_kl = sum_{m,n} X_mn e^{2 pi i (mk/N1 + nl/N2)}
/// with 1-based m, n.
BandedSpectrum dft_forward(const BinaryMatrix& x);

/// Full-band inverse transform. Throws IncompleteBand if any index of the
/// full range is missing.
RealMatrix dft_inverse(const BandedSpectrum& s);

/// Restriction of a spectrum to a sub-band. Throws BandOutOfRange if the
/// requested band is not contained in the source band.
BandedSpectrum band_extract(const BandedSpectrum& s, const Band& band);

/// Band-limited inverse: the inverse-transform sum restricted to the
/// available band, scaled by 1/(N1 N2). Generally non-binary.
RealMatrix blur(const BandedSpectrum& s);

/// Adds zero-mean Gaussian perturbations of the given variance to the real
/// and imaginary part of every free coefficient, mirroring conjugates so
/// Hermitian symmetry is preserved. The DC coefficient is perturbed
/// real-only. Deterministic for a fixed seed.
BandedSpectrum add_noise(const BandedSpectrum& s, double variance, std::uint64_t seed);

/// Rounds a real matrix to 0/1 entries (used after exact recovery).
BinaryMatrix round_to_binary(const RealMatrix& m);

}  // namespace bindeblur

#endif
