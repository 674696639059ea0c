#include <doctest.h>

#include <set>

#include "bindeblur/oracle.hpp"
#include "bindeblur/spectral.hpp"

using namespace bindeblur;

TEST_CASE("random matrices are reproducible with the requested popcount") {
  const BinaryMatrix a = random_binary_matrix(6, 8, 19, 42);
  const BinaryMatrix b = random_binary_matrix(6, 8, 19, 42);
  const BinaryMatrix c = random_binary_matrix(6, 8, 19, 43);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(a.popcount() == 19);
  CHECK(c.popcount() == 19);
  CHECK(random_binary_matrix(4, 4, 0, 1).popcount() == 0);
  CHECK(random_binary_matrix(4, 4, 16, 1).popcount() == 16);
}

TEST_CASE("brute force finds exactly the planted matrix under a tight band") {
  const BinaryMatrix x = random_binary_matrix(3, 4, 5, 2);
  const BandedSpectrum spec = dft_forward(x);
  const auto all = brute_force_recover(spec);
  REQUIRE(all.size() == 1);
  CHECK(all.front() == x);
}

TEST_CASE("brute force reports every member of an ambiguous fiber") {
  // Row/column sums only (the four-coefficient band minus the diagonal
  // coefficient) on a grid with an interchange: at least two matches.
  BinaryMatrix x(3, 3);
  x.set(1, 1, 1);
  x.set(2, 2, 1);
  const Band band(std::vector<IndexPair>{{0, 0}, {0, 1}, {0, -1}, {1, 0}, {-1, 0}});
  const BandedSpectrum spec = band_extract(dft_forward(x), band);
  const auto all = brute_force_recover(spec);
  CHECK(all.size() >= 2);
  bool found_original = false;
  for (const auto& m : all) {
    CHECK(band_extract(dft_forward(m), band).values().size() == spec.values().size());
    if (m == x) found_original = true;
  }
  CHECK(found_original);
}

TEST_CASE("brute force refuses oversized grids") {
  const BinaryMatrix x(6, 6);
  CHECK_THROWS_AS(brute_force_recover(dft_forward(x)), TooLarge);
}

TEST_CASE("exhaustive audit of a tiny grid finds no collisions") {
  const UniquenessAudit audit = audit_uniqueness(3, 3, Band::square(1), AuditMode::Exhaustive());
  CHECK(audit.collisions.empty());
}

TEST_CASE("exhaustive audit reports a known ambiguity") {
  // Row/column sums alone cannot distinguish interchange partners.
  const Band band(std::vector<IndexPair>{{0, 0}, {0, 1}, {0, -1}, {1, 0}, {-1, 0}});
  const UniquenessAudit audit = audit_uniqueness(3, 3, band, AuditMode::Exhaustive());
  REQUIRE(!audit.collisions.empty());
  for (const auto& [a, b] : audit.collisions) {
    CHECK(a != b);
    const auto sa = band_extract(dft_forward(a), band);
    const auto sb = band_extract(dft_forward(b), band);
    for (const auto& [k, l] : band.indexes())
      CHECK(std::abs(sa.value(k, l) - sb.value(k, l)) < 1e-6);
  }
}

TEST_CASE("sampled audit runs clean on a unique band") {
  const UniquenessAudit audit =
      audit_uniqueness(5, 5, Band::square(2), AuditMode::Sampled(2000, 11));
  CHECK(audit.collisions.empty());
}

TEST_CASE("checkerboard pair agrees everywhere except the top frequency") {
  const auto [a, b] = counterexample_pair(2, 2);
  REQUIRE(a.n1() == 4);
  REQUIRE(a != b);
  const BandedSpectrum sa = dft_forward(a);
  const BandedSpectrum sb = dft_forward(b);
  int disagreements = 0;
  for (const auto& [k, l] : sa.band().indexes()) {
    if (std::abs(sa.value(k, l) - sb.value(k, l)) > 1e-9) {
      ++disagreements;
      CHECK(std::abs(k) == 2);
      CHECK(std::abs(l) == 2);
    }
  }
  CHECK(disagreements == 1);  // (2,2) is its own conjugate on a 4x4 grid
}

TEST_CASE("stripe pair of the nine-grid agrees on the inner band") {
  const auto [a, b] = counterexample_pair(3, 2);
  REQUIRE(a.n1() == 9);
  REQUIRE(a != b);
  const BandedSpectrum sa = dft_forward(a);
  const BandedSpectrum sb = dft_forward(b);
  bool any_difference = false;
  for (const auto& [k, l] : sa.band().indexes()) {
    const double diff = std::abs(sa.value(k, l) - sb.value(k, l));
    if (std::abs(k) <= 2 && std::abs(l) <= 2)
      CHECK(diff < 1e-9);
    else if (diff > 1e-9)
      any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("interchange neighbors preserve the margins") {
  const BinaryMatrix x = random_binary_matrix(5, 5, 12, 33);
  const auto neighbors = interchange_neighbors(x);
  REQUIRE(!neighbors.empty());
  const Eigen::VectorXi rows = x.bits().rowwise().sum();
  const Eigen::VectorXi cols = x.bits().colwise().sum().transpose();
  for (const auto& y : neighbors) {
    CHECK(y != x);
    CHECK((x.bits() - y.bits()).cwiseAbs().sum() == 4);
    CHECK(y.bits().rowwise().sum() == rows);
    CHECK(Eigen::VectorXi(y.bits().colwise().sum().transpose()) == cols);
  }
}
