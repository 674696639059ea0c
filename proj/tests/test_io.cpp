#include <doctest.h>

#include <sstream>

#include "bindeblur/io.hpp"
#include "bindeblur/oracle.hpp"
#include "bindeblur/spectral.hpp"

using namespace bindeblur;

TEST_CASE("plain bitmap round trip is bit exact") {
  const BinaryMatrix x = random_binary_matrix(7, 11, 38, 4);
  std::stringstream buf;
  write_pbm(buf, x);
  CHECK(read_pbm(buf) == x);
}

TEST_CASE("bitmap reader accepts comments and arbitrary whitespace") {
  std::istringstream in("P1\n# a comment\n 3 2\n1 0 1\n0\t1\n0\n");
  const BinaryMatrix x = read_pbm(in);
  CHECK(x.n1() == 2);
  CHECK(x.n2() == 3);
  CHECK(x.at(1, 1) == 1);
  CHECK(x.at(1, 2) == 0);
  CHECK(x.at(2, 2) == 1);
}

TEST_CASE("bitmap reader rejects malformed input") {
  std::istringstream bad_magic("P4\n2 2\n0 1 1 0\n");
  CHECK_THROWS_AS(read_pbm(bad_magic), ParseError);
  std::istringstream truncated("P1\n2 2\n0 1 1\n");
  CHECK_THROWS_AS(read_pbm(truncated), ParseError);
  std::istringstream bad_digit("P1\n2 2\n0 1 1 2\n");
  CHECK_THROWS_AS(read_pbm(bad_digit), ParseError);
}

TEST_CASE("coefficient file round trip reproduces values exactly") {
  const BinaryMatrix x = random_binary_matrix(11, 11, 40, 12);
  const BandedSpectrum s = band_extract(dft_forward(x), Band::square(3));
  std::stringstream buf;
  write_coefficients(buf, s);
  const BandedSpectrum back = read_coefficients(buf);
  CHECK(back.n1() == s.n1());
  CHECK(back.n2() == s.n2());
  REQUIRE(back.band().indexes() == s.band().indexes());
  for (const auto& [k, l] : s.band().indexes()) CHECK(back.value(k, l) == s.value(k, l));
}

TEST_CASE("coefficient reader rejects inconsistent headers") {
  std::istringstream bad_count("dims 3 3\ncount 2\n0 0 1 0\n");
  CHECK_THROWS_AS(read_coefficients(bad_count), ParseError);
  std::istringstream garbage("hello\n");
  CHECK_THROWS_AS(read_coefficients(garbage), ParseError);
}

TEST_CASE("graymap rendering spans the display range") {
  RealMatrix m(1, 3);
  m << 0.0, 0.5, 1.0;
  std::stringstream buf;
  write_pgm(buf, m);
  std::string magic;
  int w, h, maxval;
  buf >> magic >> w >> h >> maxval;
  CHECK(magic == "P2");
  CHECK(w == 3);
  CHECK(h == 1);
  CHECK(maxval == 255);
  int a, b, c;
  buf >> a >> b >> c;
  CHECK(a == 255);  // zero maps to white
  CHECK(c == 0);    // one maps to black
  CHECK(b > c);
  CHECK(b < a);
}

TEST_CASE("report serialization carries the schema and outcome") {
  RecoveryReport report;
  report.status = RecoveryStatus::Recovered;
  report.matrix = random_binary_matrix(3, 3, 4, 1);
  report.stacked_node_count = 7;
  report.total_elapsed = 0.25;
  std::stringstream buf;
  write_report(buf, report, 3, 3);
  const std::string text = buf.str();
  CHECK(text.find("schema") != std::string::npos);
  CHECK(text.find(status_name(RecoveryStatus::Recovered)) != std::string::npos);
  CHECK(text.find("dims 3 3") != std::string::npos);
}

TEST_CASE("status and kind names are stable identifiers") {
  CHECK(std::string(status_name(RecoveryStatus::Recovered)) == "recovered");
  CHECK(std::string(status_name(RecoveryStatus::Inconsistent)) == "inconsistent");
  CHECK(std::string(status_name(RecoveryStatus::BudgetExhausted)) == "budget_exhausted");
  CHECK(std::string(kind_name(DirectionalKind::ExactSums)) == "exact_sums");
}

TEST_CASE("qr-like fixtures are deterministic with exact popcount") {
  const BinaryMatrix a = qr_like_fixture(29, 410, 9);
  const BinaryMatrix b = qr_like_fixture(29, 410, 9);
  CHECK(a == b);
  CHECK(a.popcount() == 410);
  // Finder-pattern corner: the 7x7 block at the top-left has its outer ring
  // set.
  CHECK(a.at(1, 1) == 1);
  CHECK(a.at(1, 7) == 1);
  CHECK(a.at(7, 1) == 1);
  CHECK(a.at(2, 2) == 0);  // between ring and core
  CHECK(a.at(3, 3) == 1);  // core

}
