#include <doctest.h>

#include <cmath>
#include <set>

#include "bindeblur/line_geometry.hpp"
#include "bindeblur/oracle.hpp"

using namespace bindeblur;

namespace {

/// Line popcounts of a matrix along one partition, indexed by label.
Eigen::VectorXi line_sums(const BinaryMatrix& x, const LinePartition& part) {
  Eigen::VectorXi sums = Eigen::VectorXi::Zero(part.n);
  for (int m = 1; m <= part.n; ++m)
    for (int c = 1; c <= part.n; ++c) sums(part.label(m, c) - 1) += x.at(m, c);
  return sums;
}

}  // namespace

TEST_CASE("modular helpers") {
  CHECK(mod_positive(-3, 7) == 4);
  CHECK(mod_positive(14, 7) == 0);
  CHECK(mod_inverse(3, 7) == 5);
  CHECK_THROWS(mod_inverse(6, 9));
  CHECK(is_prime(29));
  CHECK(!is_prime(25));
  CHECK(!is_prime(1));
  CHECK(prime_power_decompose(25) == std::pair<int, int>{5, 2});
  CHECK(prime_power_decompose(27) == std::pair<int, int>{3, 3});
  CHECK(prime_power_decompose(29).second == 1);
  CHECK(prime_power_decompose(15).second == 0);
}

TEST_CASE("each periodic line of a prime grid has exactly n cells") {
  const LinePartition part = line_partition(7, 2, 3);
  std::set<std::pair<int, int>> seen;
  for (int j = 1; j <= 7; ++j) {
    const auto cells = part.cells_with_label(j);
    CHECK(cells.size() == 7);
    for (const auto& c : cells) seen.insert(c);
  }
  CHECK(seen.size() == 49);
  CHECK_THROWS_AS(line_partition(7, 7, 0), ZeroDirection);
}

TEST_CASE("coefficient (k,l) is the root-of-unity sum of its line popcounts") {
  const int n = 11;
  const BinaryMatrix x = random_binary_matrix(n, n, 41, 6);
  const BandedSpectrum s = dft_forward(x);
  for (const auto [k, l] : {IndexPair{1, 0}, IndexPair{0, 1}, IndexPair{2, 5}, IndexPair{3, -2}}) {
    const Eigen::VectorXi sums = line_sums(x, line_partition(n, k, l));
    Complex want = 0.0;
    for (int j = 1; j <= n; ++j)
      want += static_cast<double>(sums(j - 1)) * std::exp(Complex(0.0, 2.0 * M_PI * j / n));
    CHECK(std::abs(s.value(k, l) - want) < 1e-9);
  }
}

TEST_CASE("slope equivalence is a modular cross product") {
  CHECK(slope_equivalent(23, {7, 5}, {1, 4}));
  CHECK(!slope_equivalent(23, {7, 5}, {1, 6}));
  CHECK(slope_equivalent(11, {2, 3}, {4, 6}));
  CHECK(slope_equivalent(11, {2, 3}, {2 - 11, 3}));
}

TEST_CASE("equivalent coefficients are unit multiples of the canonical pair") {
  const int n = 13;
  const BinaryMatrix x = random_binary_matrix(n, n, 50, 17);
  const BandedSpectrum s = dft_forward(x);
  const IndexPair canon{1, 4};
  const Eigen::VectorXi sums = line_sums(x, line_partition(n, canon.first, canon.second));
  for (const auto member : {IndexPair{2, -5}, IndexPair{3, -1}}) {
    REQUIRE(slope_equivalent(n, canon, member));
    const int u = direction_multiplier(n, canon, member);
    CHECK(mod_positive(member.first - static_cast<long long>(u) * canon.first, n) == 0);
    CHECK(mod_positive(member.second - static_cast<long long>(u) * canon.second, n) == 0);
    // The member coefficient reads the same line sums at a faster root.
    Complex want = 0.0;
    for (int j = 1; j <= n; ++j)
      want += static_cast<double>(sums(j - 1)) *
              std::exp(Complex(0.0, 2.0 * M_PI * u * j / n));
    CHECK(std::abs(s.value(member.first, member.second) - want) < 1e-9);
  }
}

TEST_CASE("canonical directions partition the non-DC band representatives") {
  const int n = 11;
  const Band band = Band::square(3);
  const auto dirs = canonical_directions(n, band);
  std::set<IndexPair> covered;
  for (const auto& d : dirs) {
    CHECK(d.m_count == static_cast<int>(d.members.size()));
    CHECK(d.line_count == n);
    CHECK(d.line_capacity == n);
    for (const auto& mem : d.members) {
      CHECK(slope_equivalent(n, {d.k, d.l}, mem));
      CHECK(covered.insert(mem).second);  // no member listed twice
    }
  }
  std::size_t non_dc = 0;
  for (const auto& rep : band.free_representatives())
    if (rep != IndexPair{0, 0}) ++non_dc;
  CHECK(covered.size() == non_dc);
  // Ordered by descending member count.
  for (std::size_t i = 1; i < dirs.size(); ++i)
    CHECK(dirs[i - 1].m_count >= dirs[i].m_count);
}

TEST_CASE("full band of a prime grid splits into n + 1 directions") {
  const int n = 7;
  const auto dirs = canonical_directions(n, Band::full(n, n));
  CHECK(dirs.size() == static_cast<std::size_t>(n + 1));
}

TEST_CASE("prime-power partition groups fine labels modulo p") {
  const PrimePowerPartition part = prime_power_partition(3, 2, 1, 2);
  CHECK(part.fine.n == 9);
  CHECK(part.coarse_modulus == 3);
  CHECK(part.coarse_of(1) == 1);
  CHECK(part.coarse_of(4) == 1);
  CHECK(part.coarse_of(9) == 3);
  // Each of the 9 fine lines has 9 cells.
  for (int j = 1; j <= 9; ++j) CHECK(part.fine.cells_with_label(j).size() == 9);
}

TEST_CASE("prime-power directions exclude coarse coefficients") {
  const auto dirs = prime_power_directions(5, 2, Band::square(5));
  std::set<IndexPair> covered;
  for (const auto& d : dirs)
    for (const auto& mem : d.members) {
      CHECK(!(mod_positive(mem.first, 5) == 0 && mod_positive(mem.second, 5) == 0));
      CHECK(covered.insert(mem).second);
    }
  CHECK(!covered.empty());
}
