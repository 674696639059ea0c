#include <doctest.h>

#include "bindeblur/oracle.hpp"
#include "bindeblur/reconstruct.hpp"
#include "bindeblur/spectral.hpp"

using namespace bindeblur;

TEST_CASE("minimal bands per dimension shape") {
  CHECK(minimal_band(7, 11).free_representatives().size() == 4);
  CHECK(minimal_band(11, 11).contains(3, 3));   // floor(sqrt(11)) = 3
  CHECK(!minimal_band(11, 11).contains(4, 0));
  CHECK(minimal_band(9, 9).contains(3, 3));     // p^(alpha-1) = 3
  CHECK(!minimal_band(9, 9).contains(4, 0));
  CHECK(minimal_band(25, 25).contains(5, 5));
  CHECK_THROWS_AS(minimal_band(6, 6), UnsupportedDims);
  CHECK_THROWS_AS(minimal_band(4, 9), UnsupportedDims);
}

TEST_CASE("dispatch rejects unsupported shapes") {
  const BinaryMatrix x(6, 6);
  const BandedSpectrum spec = dft_forward(x);
  CHECK_THROWS_AS(recover(spec, SolverConfig{}, SearchBudget{}), UnsupportedDims);
}

TEST_CASE("rectangular recovery from the four-coefficient band") {
  const BinaryMatrix x = random_binary_matrix(7, 11, 38, 19);
  const BandedSpectrum spec = band_extract(dft_forward(x), Band::rect4());
  const RecoveryReport report = recover_rect(spec, SearchBudget{});
  REQUIRE(report.status == RecoveryStatus::Recovered);
  CHECK(report.matrix == x);
}

TEST_CASE("square-prime recovery at a small size") {
  const BinaryMatrix x = random_binary_matrix(11, 11, 44, 23);
  const BandedSpectrum spec = band_extract(dft_forward(x), minimal_band(11, 11));
  const RecoveryReport report = recover_square_prime(spec, SolverConfig{}, SearchBudget{});
  REQUIRE(report.status == RecoveryStatus::Recovered);
  CHECK(report.matrix == x);
  CHECK(!report.per_direction.empty());
}

TEST_CASE("squared-prime recovery at the nine grid") {
  const BinaryMatrix x = random_binary_matrix(9, 9, 40, 31);
  const BandedSpectrum spec = band_extract(dft_forward(x), minimal_band(9, 9));
  const RecoveryReport report = recover_prime_power(spec, SolverConfig{}, SearchBudget{});
  REQUIRE(report.status == RecoveryStatus::Recovered);
  CHECK(report.matrix == x);
}

TEST_CASE("dispatcher picks the right specialist") {
  const BinaryMatrix rect = random_binary_matrix(7, 11, 38, 3);
  CHECK(recover(band_extract(dft_forward(rect), Band::rect4()), SolverConfig{}, SearchBudget{})
            .matrix == rect);
  const BinaryMatrix square = random_binary_matrix(11, 11, 44, 3);
  CHECK(recover(band_extract(dft_forward(square), Band::square(3)), SolverConfig{},
                SearchBudget{})
            .matrix == square);
}

TEST_CASE("tampered data yields Inconsistent, never a wrong matrix") {
  const BinaryMatrix x = random_binary_matrix(11, 11, 44, 23);
  const BandedSpectrum spec = band_extract(dft_forward(x), Band::square(3));
  std::vector<Complex> vals = spec.values();
  // Swap two cells' worth of signal by perturbing a mid-band coefficient by
  // an amount no binary matrix can reproduce together with the others.
  const auto& idx = spec.band().indexes();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] == IndexPair{2, 1}) vals[i] += Complex(2.1, 0.0);
    if (idx[i] == IndexPair{-2, -1}) vals[i] += Complex(2.1, 0.0);
  }
  const BandedSpectrum broken(11, 11, spec.band(), vals);
  const RecoveryReport report = recover_square_prime(broken, SolverConfig{}, SearchBudget{});
  if (report.status == RecoveryStatus::Recovered) {
    // Only acceptable if the tampered spectrum is genuinely realizable.
    CHECK(band_extract(dft_forward(report.matrix), spec.band()).values() == broken.values());
  } else {
    CHECK(report.status == RecoveryStatus::Inconsistent);
  }
}

TEST_CASE("noisy spectra recover with a matched noise floor") {
  const BinaryMatrix x = random_binary_matrix(11, 11, 44, 5);
  const BandedSpectrum spec =
      add_noise(band_extract(dft_forward(x), Band::square(4)), 1e-10, 77);
  SolverConfig cfg;
  cfg.noise_floor = 1e-5;
  SearchBudget budget;
  budget.tolerance = 1e-3;
  const RecoveryReport report = recover_square_prime(spec, cfg, budget);
  REQUIRE(report.status == RecoveryStatus::Recovered);
  CHECK(report.matrix == x);
}

TEST_CASE("direction retry can rescue an inconsistent stack") {
  // With retries enabled the report records how many drops were needed; on
  // clean data no retries should be spent.
  const BinaryMatrix x = random_binary_matrix(11, 11, 44, 8);
  const BandedSpectrum spec = band_extract(dft_forward(x), Band::square(3));
  RecoveryOptions opts;
  opts.retry_directions = true;
  const RecoveryReport report = recover_square_prime(spec, SolverConfig{}, SearchBudget{}, opts);
  REQUIRE(report.status == RecoveryStatus::Recovered);
  CHECK(report.matrix == x);
  CHECK(report.retries_used == 0);
}
