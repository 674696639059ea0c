// End-to-end acceptance checks. Each numbered check prints exactly one
// PASS/FAIL line; the process exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bindeblur/directional.hpp"
#include "bindeblur/lattice.hpp"
#include "bindeblur/oracle.hpp"
#include "bindeblur/reconstruct.hpp"
#include "bindeblur/rng.hpp"
#include "bindeblur/spectral.hpp"
#include "bindeblur/stability.hpp"

using namespace bindeblur;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int number, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s — %s\n", number, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- 1: exhaustive uniqueness of the rectangular four-coefficient band ----
void criterion1() {
  const auto start = Clock::now();
  const UniquenessAudit audit = audit_uniqueness(3, 5, Band::rect4(), AuditMode::Exhaustive());
  const double secs = seconds_since(start);
  const bool pass = audit.collisions.empty() && secs < 60.0;
  report(1, pass,
         "3x5 exhaustive audit over 2^15 matrices: " + std::to_string(audit.collisions.size()) +
             " collisions in " + std::to_string(secs) + " s");
}

// ---- 2: uniqueness of the square-prime band, exhaustive and sampled ----
void criterion2() {
  const UniquenessAudit small = audit_uniqueness(3, 3, Band::square(1), AuditMode::Exhaustive());
  const UniquenessAudit sampled =
      audit_uniqueness(5, 5, Band::square(2), AuditMode::Sampled(100000, 2024));
  const bool pass = small.collisions.empty() && sampled.collisions.empty();
  report(2, pass,
         "3x3 exhaustive: " + std::to_string(small.collisions.size()) +
             " collisions; 5x5 sampled 1e5 pairs: " + std::to_string(sampled.collisions.size()) +
             " collisions");
}

// ---- 3: the two counterexample constructions ----
void criterion3() {
  bool pass = true;
  std::string detail;

  const auto [c1, c2] = counterexample_pair(2, 2);
  const BandedSpectrum s1 = dft_forward(c1), s2 = dft_forward(c2);
  int outside = 0;
  for (const auto& [k, l] : s1.band().indexes()) {
    const double diff = std::abs(s1.value(k, l) - s2.value(k, l));
    if (k == 2 && l == 2) {
      if (diff < 1e-9) pass = false;  // must differ at the top corner
    } else if (diff > 1e-12) {
      ++outside;
    }
  }
  pass = pass && outside == 0 && c1 != c2;
  detail += "4x4 checkerboards differ only at (2,2)";

  const auto [t1, t2] = counterexample_pair(3, 2);
  const BandedSpectrum u1 = dft_forward(t1), u2 = dft_forward(t2);
  double max_inner = 0.0;
  for (const auto& [k, l] : u1.band().indexes())
    if (std::abs(k) <= 2 && std::abs(l) <= 2)
      max_inner = std::max(max_inner, std::abs(u1.value(k, l) - u2.value(k, l)));
  pass = pass && max_inner < 1e-9 && t1 != t2;
  detail += "; 9x9 stripes agree on |k|,|l|<=2 within " + std::to_string(max_inner);

  report(3, pass, detail);
}

// ---- 4: exact combinatorial counts ----
void criterion4() {
  bool pass = count_bounded_compositions(38, 7, 11) == BigInt(1528688) &&
              count_bounded_compositions(38, 11, 7) == BigInt(443658688);
  for (int p = 1; p <= 6 && pass; ++p)
    for (int k = 0; k <= 3 && pass; ++k) {
      BigInt brute = 0;
      std::vector<int> e(p, -k);
      while (true) {
        long long sum = 0;
        for (int v : e) sum += v;
        if (sum == 0) ++brute;
        int i = 0;
        while (i < p && e[i] == k) {
          e[i] = -k;
          ++i;
        }
        if (i == p) break;
        ++e[i];
      }
      pass = nu(p, k) == brute;
    }
  report(4, pass, "bounded-composition reference values and zero-sum counts for p<=6, K<=3");
}

// ---- 5: digits-of-precision regression ----
void criterion5() {
  const int d1 = digits_estimate_rounded(13, 11, 1);
  const int d2 = digits_estimate_rounded(29, 29, 2);
  const int d3 = digits_estimate_rounded(17, 17, 2);
  const bool pass = std::abs(d1 - 7) <= 1 && std::abs(d2 - 11) <= 1 && std::abs(d3 - 5) <= 1;
  report(5, pass,
         "digit estimates " + std::to_string(d1) + "/" + std::to_string(d2) + "/" +
             std::to_string(d3) + " vs references 7/11/5 (tolerance 1)");
}

// ---- 6: rectangular end-to-end trials ----
void criterion6() {
  int successes = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const BinaryMatrix model = random_binary_matrix(7, 11, 38, mix_seed(1, trial));
    const BandedSpectrum spec = band_extract(dft_forward(model), Band::rect4());
    const auto start = Clock::now();
    const RecoveryReport rep = recover(spec, SolverConfig{}, SearchBudget{}, {});
    worst = std::max(worst, seconds_since(start));
    if (rep.status == RecoveryStatus::Recovered && rep.matrix == model) ++successes;
  }
  const bool pass = successes == 30 && worst <= 640.0;
  report(6, pass,
         "7x11 four-coefficient recovery: " + std::to_string(successes) +
             "/30 exact, slowest trial " + std::to_string(worst) + " s");
}

// ---- 7 & 8: square-prime end-to-end trials, and the over-complete retry ----
void criteria7and8() {
  int ok17 = 0;
  for (int seed = 1; seed <= 20; ++seed) {
    const BinaryMatrix model = random_binary_matrix(17, 17, 144, seed);
    const BandedSpectrum spec = band_extract(dft_forward(model), Band::square(4));
    const RecoveryReport rep = recover(spec, SolverConfig{}, SearchBudget{}, {});
    if (rep.status == RecoveryStatus::Recovered && rep.matrix == model) ++ok17;
  }

  int ok29 = 0;
  bool wrong_answer = false;
  std::vector<int> failed_seeds;
  for (int seed = 1; seed <= 10; ++seed) {
    const BinaryMatrix model = random_binary_matrix(29, 29, 420, seed);
    const BandedSpectrum spec = band_extract(dft_forward(model), Band::square(5));
    const RecoveryReport rep = recover(spec, SolverConfig{}, SearchBudget{}, {});
    if (rep.status == RecoveryStatus::Recovered) {
      if (rep.matrix == model) {
        ++ok29;
      } else {
        wrong_answer = true;
      }
    } else {
      failed_seeds.push_back(seed);
      if (rep.status != RecoveryStatus::Inconsistent) wrong_answer = true;
    }
  }
  const bool pass7 = ok17 >= 19 && ok29 >= 8 && !wrong_answer;
  report(7, pass7,
         "17x17: " + std::to_string(ok17) + "/20 exact; 29x29: " + std::to_string(ok29) +
             "/10 exact; failures " + (wrong_answer ? "included a wrong result" : "clean"));

  // Any failed 29x29 seed must succeed with the larger band; when there are
  // no failures the widened band is still exercised on the first seed.
  std::vector<int> retry = failed_seeds.empty() ? std::vector<int>{1} : failed_seeds;
  bool pass8 = true;
  for (int seed : retry) {
    const BinaryMatrix model = random_binary_matrix(29, 29, 420, seed);
    const BandedSpectrum spec = band_extract(dft_forward(model), Band::square(6));
    const RecoveryReport rep = recover(spec, SolverConfig{}, SearchBudget{}, {});
    pass8 = pass8 && rep.status == RecoveryStatus::Recovered && rep.matrix == model;
  }
  report(8, pass8,
         failed_seeds.empty()
             ? "no L=5 failures; widened band L=6 verified exact on seed 1"
             : "all " + std::to_string(retry.size()) + " failed seeds exact at L=6");
}

// ---- 9: squared-prime end-to-end trials plus the printed worked example ----
void criterion9() {
  int ok25 = 0;
  bool wrong_answer = false;
  for (int seed = 1; seed <= 20; ++seed) {
    const BinaryMatrix model = random_binary_matrix(25, 25, 312, seed);
    const BandedSpectrum spec = band_extract(dft_forward(model), Band::square(5));
    const RecoveryReport rep = recover(spec, SolverConfig{}, SearchBudget{}, {});
    if (rep.status == RecoveryStatus::Recovered) {
      if (rep.matrix == model) {
        ++ok25;
      } else {
        wrong_answer = true;
      }
    } else if (rep.status != RecoveryStatus::Inconsistent) {
      wrong_answer = true;
    }
  }

  // Worked example: one coefficient of value e^{2 pi i / 9} on the nine
  // grid with popcount 40 pins the within-coarse-class offsets
  // eta_1 - eta_4 = eta_1 - eta_7 = 1, all other offsets 0, total 40.
  Band band(std::vector<IndexPair>{{0, 0}, {1, 2}, {-1, -2}});
  const Complex root = std::exp(Complex(0.0, 2.0 * M_PI / 9.0));
  std::vector<Complex> vals;
  for (const auto& [k, l] : band.indexes())
    vals.push_back(k == 0 ? Complex(40.0, 0.0) : (k > 0 ? root : std::conj(root)));
  const BandedSpectrum example(9, 9, band, vals);
  DirectionClass dir;
  dir.k = 1;
  dir.l = 2;
  dir.members = {{1, 2}};
  dir.m_count = 1;
  dir.line_count = 9;
  dir.line_capacity = 9;
  const DirectionalData block = extract_constraint_block(example, 3, dir, SolverConfig{});
  bool example_ok = block.kind == DirectionalKind::ConstraintBlock;
  if (example_ok) {
    Eigen::VectorXd truth(9);
    truth << 5, 5, 4, 4, 5, 4, 4, 5, 4;  // delta at label 1 plus class constants
    const Eigen::VectorXd err = block.constraint_rows * truth - block.constraint_rhs;
    example_ok = err.cwiseAbs().maxCoeff() < 1e-9;
    // The pattern itself: six within-class difference rows plus the total.
    example_ok = example_ok && block.constraint_rows.rows() == 7 &&
                 block.constraint_rhs(6) == 40.0;
  }

  const bool pass = ok25 >= 14 && !wrong_answer && example_ok;
  report(9, pass,
         "25x25: " + std::to_string(ok25) + "/20 exact, failures " +
             (wrong_answer ? "included a wrong result" : "clean") + "; nine-grid example " +
             (example_ok ? "reproduced" : "broken"));
}

// ---- 10: the noisy-band experiment ----
void criterion10() {
  const BinaryMatrix x = random_binary_matrix(29, 29, 420, 1);
  SolverConfig cfg;
  cfg.noise_floor = 1e-2;  // noise standard deviation of variance 1e-4
  SearchBudget budget;
  budget.tolerance = 0.1;

  const BandedSpectrum low =
      add_noise(band_extract(dft_forward(x), Band::square(5)), 1e-4, 99);
  const RecoveryReport rep_low = recover(low, cfg, budget, {});
  const bool fails_low =
      !(rep_low.status == RecoveryStatus::Recovered && rep_low.matrix == x);

  int recovered_at = 0;
  for (int limit = 6; limit <= 9 && recovered_at == 0; ++limit) {
    const BandedSpectrum s =
        add_noise(band_extract(dft_forward(x), Band::square(limit)), 1e-4, 99);
    const RecoveryReport rep = recover(s, cfg, budget, {});
    if (rep.status == RecoveryStatus::Recovered && rep.matrix == x) recovered_at = limit;
  }

  const bool pass = fails_low && recovered_at != 0;
  report(10, pass,
         std::string("29x29 with noise variance 1e-4: L=5 ") +
             (fails_low ? "fails" : "unexpectedly succeeds") + ", exact again at L=" +
             (recovered_at ? std::to_string(recovered_at) : std::string("none<=9")));
}

// ---- 11: solver property suites with no end-to-end fixtures ----
void criterion11() {
  Rng rng(31337);
  bool lll_ok = true;
  for (int trial = 0; trial < 200 && lll_ok; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next_below(29));
    RealMatrix b(dim, dim);
    do {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          b(i, j) = static_cast<double>(static_cast<int>(rng.next_below(19)) - 9);
    } while (std::abs(b.fullPivLu().determinant()) < 0.5);
    LatticeBasis basis;
    basis.vectors = b;
    const LatticeBasis out = lll_reduce(basis, 0.75);
    // Unimodular change of basis.
    const RealMatrix u = b.fullPivLu().solve(out.vectors);
    for (int i = 0; i < dim && lll_ok; ++i)
      for (int j = 0; j < dim && lll_ok; ++j)
        lll_ok = std::abs(u(i, j) - std::round(u(i, j))) < 1e-6;
    lll_ok = lll_ok && std::abs(std::abs(u.determinant()) - 1.0) < 1e-6;
    // Lovasz condition via an independent Gram-Schmidt pass.
    RealMatrix bstar = out.vectors;
    RealMatrix mu = RealMatrix::Identity(dim, dim);
    Eigen::VectorXd norms(dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < i; ++j) {
        mu(i, j) = out.vectors.col(i).dot(bstar.col(j)) / norms(j);
        bstar.col(i) -= mu(i, j) * bstar.col(j);
      }
      norms(i) = bstar.col(i).squaredNorm();
    }
    for (int k = 1; k < dim && lll_ok; ++k)
      lll_ok = norms(k) >= (0.75 - mu(k, k - 1) * mu(k, k - 1)) * norms(k - 1) - 1e-6;
    for (int i = 0; i < dim && lll_ok; ++i)
      for (int j = 0; j < i && lll_ok; ++j) lll_ok = std::abs(mu(i, j)) <= 0.5 + 1e-9;
  }

  bool feas_ok = true;
  int checked = 0;
  for (int trial = 0; trial < 100 && feas_ok; ++trial) {
    const int vars = 2 + static_cast<int>(rng.next_below(19));  // up to 20
    const int rows = 1 + static_cast<int>(rng.next_below(3));
    IntegerSystem sys;
    sys.a = RealMatrix::Zero(rows, vars);
    for (int r = 0; r < rows; ++r)
      for (int j = 0; j < vars; ++j)
        sys.a(r, j) = static_cast<double>(static_cast<int>(rng.next_below(7)) - 3);
    sys.lower = Eigen::VectorXi::Zero(vars);
    sys.upper = Eigen::VectorXi::Ones(vars);
    sys.b = Eigen::VectorXd::Zero(rows);
    if (trial % 2 == 0) {
      Eigen::VectorXi x(vars);
      for (int j = 0; j < vars; ++j) x(j) = static_cast<int>(rng.next_below(2));
      sys.b = sys.a * x.cast<double>();
    } else {
      for (int r = 0; r < rows; ++r)
        sys.b(r) = static_cast<double>(static_cast<int>(rng.next_below(9)) - 4) + 0.5;
    }
    // Exhaustive oracle over all 0/1 assignments, walked in Gray-code order
    // so each step updates the row sums in O(rows).
    bool want = false;
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(rows);
    std::uint64_t gray = 0;
    const std::uint64_t total = 1ULL << vars;
    for (std::uint64_t i = 0;; ++i) {
      if ((sums - sys.b).cwiseAbs().maxCoeff() <= 1e-6) {
        want = true;
        break;
      }
      if (i + 1 == total) break;
      const std::uint64_t next = (i + 1) ^ ((i + 1) >> 1);
      const std::uint64_t flipped = gray ^ next;
      int bit = 0;
      while (((flipped >> bit) & 1ULL) == 0) ++bit;
      const double sign = ((next >> bit) & 1ULL) ? 1.0 : -1.0;
      sums += sign * sys.a.col(bit);
      gray = next;
    }
    const FeasibilityResult got = solve_feasibility(sys, SearchBudget{});
    feas_ok = got.status != FeasibilityStatus::BudgetExhausted &&
              (got.status == FeasibilityStatus::Found) == want;
    if (want && feas_ok)
      feas_ok = sys.within_bounds(got.x) && sys.residual(got.x) <= 1e-6;
    ++checked;
  }

  report(11, lll_ok && feas_ok,
         std::string("reduction properties on 200 bases ") + (lll_ok ? "hold" : "violated") +
             "; feasibility matched exhaustive enumeration on " + std::to_string(checked) +
             " systems");
}

// ---- 12: transform invariants on a thousand seeded matrices ----
void criterion12() {
  bool pass = true;
  int count = 0;
  for (std::uint64_t seed = 1; seed <= 1000 && pass; ++seed) {
    const int n1 = 2 + static_cast<int>(mix_seed(seed, 1) % 30);  // up to 31
    const int n2 = 2 + static_cast<int>(mix_seed(seed, 2) % 30);
    const int pop = static_cast<int>(mix_seed(seed, 3) % (n1 * n2 + 1));
    const BinaryMatrix x = random_binary_matrix(n1, n2, pop, seed);
    const BandedSpectrum s = dft_forward(x);
    pass = std::abs(s.value(0, 0) - Complex(pop, 0.0)) < 1e-9;
    for (const auto& [k, l] : s.band().indexes()) {
      if (!pass) break;
      if (s.has(-k, -l)) pass = std::abs(s.value(-k, -l) - std::conj(s.value(k, l))) < 1e-9;
    }
    if (pass) {
      const RealMatrix back = dft_inverse(s);
      pass = (back - x.bits().cast<double>()).cwiseAbs().maxCoeff() < 1e-9 &&
             round_to_binary(back) == x;
    }
    ++count;
  }
  report(12, pass,
         "round trip, conjugate symmetry, and integral DC on " + std::to_string(count) +
             " seeded matrices");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criteria7and8();
  criterion9();
  criterion10();
  criterion11();
  criterion12();
  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
