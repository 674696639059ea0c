#include "bindeblur/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "bindeblur/rng.hpp"

namespace bindeblur {

namespace {

/// W[a, i] = exp(2 pi i * (i+1) * k_a / n) where k_a runs over the full
/// frequency range of a dimension of size n and i is a 0-based spatial index.
ComplexMatrix forward_phase_table(int n) {
  ComplexMatrix w(n, n);
  const int lo = frequency_low(n);
  for (int a = 0; a < n; ++a) {
    const int k = lo + a;
    for (int i = 0; i < n; ++i) {
      const double angle = 2.0 * M_PI * static_cast<double>(k) * (i + 1) / n;
      w(a, i) = Complex(std::cos(angle), std::sin(angle));
    }
  }
  return w;
}

}  // namespace

BinaryMatrix::BinaryMatrix(IntMatrix bits) : bits_(std::move(bits)) {
  for (int i = 0; i < bits_.rows(); ++i)
    for (int j = 0; j < bits_.cols(); ++j)
      if (bits_(i, j) != 0 && bits_(i, j) != 1)
        throw std::invalid_argument("BinaryMatrix: entry not 0/1");
}

void BinaryMatrix::set(int m, int n, int value) {
  if (value != 0 && value != 1) throw std::invalid_argument("BinaryMatrix: entry not 0/1");
  bits_(m - 1, n - 1) = value;
}

Band::Band(std::vector<IndexPair> indexes) : indexes_(std::move(indexes)) {
  std::sort(indexes_.begin(), indexes_.end());
  indexes_.erase(std::unique(indexes_.begin(), indexes_.end()), indexes_.end());
  if (!contains(0, 0)) throw std::invalid_argument("Band: must contain (0,0)");
}

Band Band::full(int n1, int n2) {
  std::vector<IndexPair> idx;
  idx.reserve(static_cast<std::size_t>(n1) * n2);
  for (int k = frequency_low(n1); k <= frequency_high(n1); ++k)
    for (int l = frequency_low(n2); l <= frequency_high(n2); ++l) idx.emplace_back(k, l);
  return Band(std::move(idx));
}

Band Band::square(int limit) {
  std::vector<IndexPair> idx;
  for (int k = -limit; k <= limit; ++k)
    for (int l = -limit; l <= limit; ++l) idx.emplace_back(k, l);
  return Band(std::move(idx));
}

Band Band::rect4() {
  return Band({{0, 0}, {0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {-1, -1}});
}

bool Band::contains(int k, int l) const {
  return std::binary_search(indexes_.begin(), indexes_.end(), IndexPair{k, l});
}

std::vector<IndexPair> Band::free_representatives() const {
  std::vector<IndexPair> reps;
  for (const auto& [k, l] : indexes_) {
    if (k > 0 || (k == 0 && l >= 0)) reps.emplace_back(k, l);
    // Indexes whose negation falls outside the band (even-dimension edge
    // frequencies that are their own conjugate mod N) are kept as well.
    else if (!contains(-k, -l)) reps.emplace_back(k, l);
  }
  return reps;
}

bool Band::is_subset_of(const Band& other) const {
  for (const auto& [k, l] : indexes_)
    if (!other.contains(k, l)) return false;
  return true;
}

BandedSpectrum::BandedSpectrum(int n1, int n2, Band band, std::vector<Complex> values)
    : n1_(n1), n2_(n2), band_(std::move(band)), values_(std::move(values)) {
  if (values_.size() != band_.size())
    throw std::invalid_argument("BandedSpectrum: value count does not match band");
}

Complex BandedSpectrum::value(int k, int l) const {
  const auto& idx = band_.indexes();
  auto it = std::lower_bound(idx.begin(), idx.end(), IndexPair{k, l});
  if (it == idx.end() || *it != IndexPair{k, l})
    throw BandOutOfRange("BandedSpectrum: index not in band");
  return values_[static_cast<std::size_t>(it - idx.begin())];
}

int BandedSpectrum::popcount() const {
  return static_cast<int>(std::llround(value(0, 0).real()));
}

void BandedSpectrum::validate(double tolerance) const {
  const Complex dc = value(0, 0);
  if (std::abs(dc.imag()) > tolerance) throw InvalidSpectrum("DC coefficient not real");
  const double s = dc.real();
  if (std::abs(s - std::round(s)) > tolerance || s < -tolerance ||
      s > static_cast<double>(n1_) * n2_ + tolerance)
    throw InvalidSpectrum("DC coefficient not an admissible popcount");
  const auto& idx = band_.indexes();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto [k, l] = idx[i];
    // Conjugate partner, reduced into the stored frequency range.
    int nk = -k, nl = -l;
    if (nk < frequency_low(n1_)) nk += n1_;
    if (nl < frequency_low(n2_)) nl += n2_;
    if (!band_.contains(nk, nl)) {
      if (nk == k && nl == l) continue;  // self-conjugate edge frequency
      throw InvalidSpectrum("band not closed under conjugation");
    }
    const Complex v = values_[i];
    const Complex w = value(nk, nl);
    if (std::abs(v - std::conj(w)) > tolerance)
      throw InvalidSpectrum("Hermitian symmetry violated");
  }
}

BandedSpectrum dft_forward(const BinaryMatrix& x) {
  const int n1 = x.n1(), n2 = x.n2();
  const ComplexMatrix w1 = forward_phase_table(n1);
  const ComplexMatrix w2 = forward_phase_table(n2);
  const ComplexMatrix grid = w1 * x.bits().cast<Complex>() * w2.transpose();

  Band band = Band::full(n1, n2);
  std::vector<Complex> values;
  values.reserve(band.size());
  // Band indexes are sorted by (k, l); grid row a corresponds to
  // k = frequency_low(n1) + a.
  for (const auto& [k, l] : band.indexes())
    values.push_back(grid(k - frequency_low(n1), l - frequency_low(n2)));
  return BandedSpectrum(n1, n2, std::move(band), std::move(values));
}

RealMatrix dft_inverse(const BandedSpectrum& s) {
  const int n1 = s.n1(), n2 = s.n2();
  ComplexMatrix grid(n1, n2);
  for (int k = frequency_low(n1); k <= frequency_high(n1); ++k)
    for (int l = frequency_low(n2); l <= frequency_high(n2); ++l) {
      if (!s.has(k, l)) throw IncompleteBand("dft_inverse: missing index");
      grid(k - frequency_low(n1), l - frequency_low(n2)) = s.value(k, l);
    }
  const ComplexMatrix w1 = forward_phase_table(n1);
  const ComplexMatrix w2 = forward_phase_table(n2);
  const ComplexMatrix out = w1.adjoint() * grid * w2.conjugate();
  return out.real() / (static_cast<double>(n1) * n2);
}

BandedSpectrum band_extract(const BandedSpectrum& s, const Band& band) {
  std::vector<Complex> values;
  values.reserve(band.size());
  for (const auto& [k, l] : band.indexes()) {
    if (!s.has(k, l)) throw BandOutOfRange("band_extract: index outside source band");
    values.push_back(s.value(k, l));
  }
  return BandedSpectrum(s.n1(), s.n2(), band, std::move(values));
}

RealMatrix blur(const BandedSpectrum& s) {
  const int n1 = s.n1(), n2 = s.n2();
  RealMatrix out = RealMatrix::Zero(n1, n2);
  const double scale = 1.0 / (static_cast<double>(n1) * n2);
  const auto& idx = s.band().indexes();
  const auto& vals = s.values();
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < idx.size(); ++t) {
        const auto [k, l] = idx[t];
        const double angle =
            -2.0 * M_PI * (static_cast<double>(k) * (i + 1) / n1 +
                           static_cast<double>(l) * (j + 1) / n2);
        acc += vals[t].real() * std::cos(angle) - vals[t].imag() * std::sin(angle);
      }
      out(i, j) = acc * scale;
    }
  }
  return out;
}

BandedSpectrum add_noise(const BandedSpectrum& s, double variance, std::uint64_t seed) {
  if (variance < 0) throw std::invalid_argument("add_noise: negative variance");
  std::vector<Complex> values(s.values());
  if (variance == 0.0) return BandedSpectrum(s.n1(), s.n2(), s.band(), std::move(values));

  Rng rng(seed);
  const double sigma = std::sqrt(variance);
  const auto& idx = s.band().indexes();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto [k, l] = idx[i];
    if (!(k > 0 || (k == 0 && l >= 0))) continue;  // free representatives only
    if (k == 0 && l == 0) {
      values[i] += Complex(sigma * rng.next_normal(), 0.0);
      continue;
    }
    int nk = -k, nl = -l;
    if (nk < frequency_low(s.n1())) nk += s.n1();
    if (nl < frequency_low(s.n2())) nl += s.n2();
    if (nk == k && nl == l) {  // self-conjugate edge frequency: keep it real
      values[i] += Complex(sigma * rng.next_normal(), 0.0);
      continue;
    }
    const Complex noise(sigma * rng.next_normal(), sigma * rng.next_normal());
    values[i] += noise;
    if (s.has(nk, nl)) {
      const auto& band_idx = s.band().indexes();
      auto it = std::lower_bound(band_idx.begin(), band_idx.end(), IndexPair{nk, nl});
      values[static_cast<std::size_t>(it - band_idx.begin())] += std::conj(noise);
    }
  }
  return BandedSpectrum(s.n1(), s.n2(), s.band(), std::move(values));
}

BinaryMatrix round_to_binary(const RealMatrix& m) {
  BinaryMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.bits()(i, j) = m(i, j) > 0.5 ? 1 : 0;
  return out;
}

}  // namespace bindeblur
