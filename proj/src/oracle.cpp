#include "bindeblur/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "bindeblur/rng.hpp"

namespace bindeblur {

namespace {

/// Per-cell contribution of a set bit to each tracked coefficient.
std::vector<std::vector<Complex>> phase_tables(int n1, int n2,
                                               const std::vector<IndexPair>& indexes) {
  std::vector<std::vector<Complex>> tables(static_cast<std::size_t>(n1) * n2);
  for (int m = 1; m <= n1; ++m) {
    for (int n = 1; n <= n2; ++n) {
      auto& cell = tables[static_cast<std::size_t>(m - 1) * n2 + (n - 1)];
      cell.reserve(indexes.size());
      for (const auto& [k, l] : indexes) {
        const double angle = 2.0 * M_PI * (static_cast<double>(k) * m / n1 +
                                           static_cast<double>(l) * n / n2);
        cell.emplace_back(std::cos(angle), std::sin(angle));
      }
    }
  }
  return tables;
}

BinaryMatrix matrix_from_mask(std::uint32_t mask, int n1, int n2) {
  BinaryMatrix x(n1, n2);
  for (int c = 0; c < n1 * n2; ++c)
    if (mask & (1u << c)) x.bits()(c / n2, c % n2) = 1;
  return x;
}

/// Walks all 2^cells bit patterns in Gray-code order, keeping the tracked
/// coefficient values current, and calls visit(mask, values) for each.
template <typename Visit>
void gray_walk(int n1, int n2, const std::vector<IndexPair>& indexes, Visit visit) {
  const int cells = n1 * n2;
  if (cells > kExhaustiveCellCap)
    throw TooLarge("exhaustive enumeration beyond the 25-cell cap");
  const auto tables = phase_tables(n1, n2, indexes);
  std::vector<Complex> current(indexes.size(), Complex(0.0, 0.0));
  const std::uint64_t total = std::uint64_t{1} << cells;
  std::uint32_t mask = 0;
  visit(mask, current);
  for (std::uint64_t g = 1; g < total; ++g) {
    const int bit = __builtin_ctzll(g);
    const std::uint32_t flip = 1u << bit;
    mask ^= flip;
    const double sign = (mask & flip) ? 1.0 : -1.0;
    const auto& cell = tables[static_cast<std::size_t>(bit)];
    for (std::size_t i = 0; i < current.size(); ++i) current[i] += sign * cell[i];
    visit(mask, current);
  }
}

std::uint64_t quantized_hash(const std::vector<Complex>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](long long q) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= static_cast<std::uint64_t>(q >> (8 * byte)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const Complex& v : values) {
    mix(std::llround(v.real() * 1e6));
    mix(std::llround(v.imag() * 1e6));
  }
  return h;
}

bool spectra_match(const BandedSpectrum& a, const BandedSpectrum& b, double tolerance) {
  const auto& va = a.values();
  const auto& vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i)
    if (std::abs(va[i] - vb[i]) > tolerance) return false;
  return true;
}

}  // namespace

std::vector<BinaryMatrix> brute_force_recover(const BandedSpectrum& spec, double tolerance) {
  const int n1 = spec.n1(), n2 = spec.n2();
  const std::vector<IndexPair> reps = spec.band().free_representatives();
  std::vector<Complex> target;
  target.reserve(reps.size());
  for (const auto& [k, l] : reps) target.push_back(spec.value(k, l));

  std::vector<BinaryMatrix> matches;
  gray_walk(n1, n2, reps, [&](std::uint32_t mask, const std::vector<Complex>& current) {
    for (std::size_t i = 0; i < current.size(); ++i)
      if (std::abs(current[i] - target[i]) > tolerance) return;
    matches.push_back(matrix_from_mask(mask, n1, n2));
  });
  return matches;
}

UniquenessAudit audit_uniqueness(int n1, int n2, const Band& band, const AuditMode& mode) {
  UniquenessAudit audit;
  audit.n1 = n1;
  audit.n2 = n2;
  audit.band = band;
  audit.mode = mode;
  const std::vector<IndexPair> reps = band.free_representatives();

  const auto banded = [&](const BinaryMatrix& x) {
    return band_extract(dft_forward(x), band);
  };

  if (mode.exhaustive) {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> hashes;
    hashes.reserve(std::size_t{1} << std::min(n1 * n2, kExhaustiveCellCap));
    gray_walk(n1, n2, reps, [&](std::uint32_t mask, const std::vector<Complex>& current) {
      hashes.emplace_back(quantized_hash(current), mask);
    });
    std::sort(hashes.begin(), hashes.end());
    std::size_t begin = 0;
    while (begin < hashes.size()) {
      std::size_t end = begin + 1;
      while (end < hashes.size() && hashes[end].first == hashes[begin].first) ++end;
      if (end - begin > 1) {
        // Candidate bucket: re-verify every pair exactly to kill both hash
        // and quantization false positives.
        for (std::size_t i = begin; i < end; ++i) {
          const BinaryMatrix a = matrix_from_mask(hashes[i].second, n1, n2);
          const BandedSpectrum sa = banded(a);
          for (std::size_t j = i + 1; j < end; ++j) {
            const BinaryMatrix b = matrix_from_mask(hashes[j].second, n1, n2);
            if (spectra_match(sa, banded(b), 1e-6)) audit.collisions.emplace_back(a, b);
          }
        }
      }
      begin = end;
    }
  } else {
    Rng rng(mode.seed);
    const auto random_matrix = [&]() {
      BinaryMatrix x(n1, n2);
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) x.bits()(i, j) = static_cast<int>(rng.next_below(2));
      return x;
    };
    for (long long trial = 0; trial < mode.sample_count; ++trial) {
      const BinaryMatrix a = random_matrix();
      const BinaryMatrix b = random_matrix();
      if (a == b) continue;
      if (spectra_match(banded(a), banded(b), 1e-6)) audit.collisions.emplace_back(a, b);
    }
  }
  return audit;
}

std::pair<BinaryMatrix, BinaryMatrix> counterexample_pair(int p, int alpha) {
  if (alpha < 2) throw std::invalid_argument("counterexample_pair: alpha must be >= 2");
  int n = 1;
  for (int i = 0; i < alpha; ++i) n *= p;
  BinaryMatrix a(n, n), b(n, n);
  if (p == 2) {
    // Checkerboards of opposite parity.
    for (int m = 1; m <= n; ++m)
      for (int c = 1; c <= n; ++c) {
        if ((m + c) % 2 == 0) a.set(m, c, 1);
        else b.set(m, c, 1);
      }
  } else {
    // Stripe pair: ones where m + c is 1 resp. 0 modulo p.
    for (int m = 1; m <= n; ++m)
      for (int c = 1; c <= n; ++c) {
        const int r = (m + c) % p;
        if (r == 1) a.set(m, c, 1);
        else if (r == 0) b.set(m, c, 1);
      }
  }
  return {a, b};
}

std::vector<BinaryMatrix> interchange_neighbors(const BinaryMatrix& x) {
  std::vector<BinaryMatrix> neighbors;
  const int n1 = x.n1(), n2 = x.n2();
  for (int i = 1; i <= n1; ++i)
    for (int i2 = i + 1; i2 <= n1; ++i2)
      for (int j = 1; j <= n2; ++j)
        for (int j2 = j + 1; j2 <= n2; ++j2) {
          const int a = x.at(i, j), b = x.at(i, j2);
          const int c = x.at(i2, j), d = x.at(i2, j2);
          if (a == d && b == c && a != b) {
            BinaryMatrix y = x;
            y.set(i, j, b);
            y.set(i, j2, a);
            y.set(i2, j, d);
            y.set(i2, j2, c);
            neighbors.push_back(std::move(y));
          }
        }
  return neighbors;
}

BinaryMatrix random_binary_matrix(int n1, int n2, int popcount, std::uint64_t seed) {
  const int cells = n1 * n2;
  if (popcount < 0 || popcount > cells)
    throw std::invalid_argument("random_binary_matrix: popcount out of range");
  std::vector<int> order(cells);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates: the first `popcount` positions receive the ones.
  for (int i = 0; i < popcount; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(cells - i)));
    std::swap(order[i], order[j]);
  }
  BinaryMatrix x(n1, n2);
  for (int i = 0; i < popcount; ++i) x.bits()(order[i] / n2, order[i] % n2) = 1;
  return x;
}

}  // namespace bindeblur
