#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "bindeblur/lattice.hpp"
#include "bindeblur/rng.hpp"

using namespace bindeblur;

namespace {

struct GsCheck {
  RealMatrix mu;
  Eigen::VectorXd norms_sq;
};

/// Independent Gram-Schmidt used to verify reduction properties.
GsCheck gram_schmidt_oracle(const RealMatrix& b) {
  const int n = static_cast<int>(b.cols());
  GsCheck gs;
  RealMatrix bstar = b;
  gs.mu = RealMatrix::Identity(n, n);
  gs.norms_sq.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      gs.mu(i, j) = b.col(i).dot(bstar.col(j)) / gs.norms_sq(j);
      bstar.col(i) -= gs.mu(i, j) * bstar.col(j);
    }
    gs.norms_sq(i) = bstar.col(i).squaredNorm();
  }
  return gs;
}

RealMatrix random_integer_basis(Rng& rng, int dim) {
  RealMatrix b(dim, dim);
  while (true) {
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        b(i, j) = static_cast<double>(static_cast<int>(rng.next_below(21)) - 10);
    if (std::abs(b.determinant()) > 0.5) return b;
  }
}

/// True iff the columns of reduced are an integer unimodular transform of
/// the columns of original (same lattice).
bool same_lattice(const RealMatrix& original, const RealMatrix& reduced) {
  const RealMatrix u = original.fullPivLu().solve(reduced);
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j)
      if (std::abs(u(i, j) - std::round(u(i, j))) > 1e-6) return false;
  return std::abs(std::abs(u.determinant()) - 1.0) < 1e-6;
}

}  // namespace

TEST_CASE("reduction on a classic worked example") {
  LatticeBasis basis;
  basis.vectors = RealMatrix(2, 2);
  basis.vectors << 1, 1, 1, 2;  // columns (1,1) and (1,2)
  const LatticeBasis out = lll_reduce(basis, 0.75);
  // Shortest vectors of this lattice have norm 1.
  CHECK(out.vectors.col(0).norm() == doctest::Approx(1.0));
  CHECK(same_lattice(basis.vectors, out.vectors));
}

TEST_CASE("reduced bases satisfy size reduction and the Lovasz condition") {
  Rng rng(99);
  const double delta = 0.75;
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 2 + static_cast<int>(rng.next_below(9));
    LatticeBasis basis;
    basis.vectors = random_integer_basis(rng, dim);
    const LatticeBasis out = lll_reduce(basis, delta);
    CHECK(same_lattice(basis.vectors, out.vectors));
    const GsCheck gs = gram_schmidt_oracle(out.vectors);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < i; ++j) CHECK(std::abs(gs.mu(i, j)) <= 0.5 + 1e-9);
    for (int k = 1; k < dim; ++k)
      CHECK(gs.norms_sq(k) >=
            (delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.norms_sq(k - 1) - 1e-6);
  }
}

TEST_CASE("dependent input is rejected") {
  LatticeBasis basis;
  basis.vectors = RealMatrix(3, 2);
  basis.vectors << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(lll_reduce(basis, 0.75), DependentBasis);
}

TEST_CASE("time limit reports a timeout without corrupting the basis") {
  Rng rng(123);
  LatticeBasis basis;
  basis.vectors = random_integer_basis(rng, 12);
  LllOptions opts;
  opts.time_limit = 1e-9;
  const LllOutcome out = lll_reduce(basis, opts);
  CHECK(out.basis.vectors.cols() == 12);
  CHECK(same_lattice(basis.vectors, out.basis.vectors));
}

TEST_CASE("integer-system solver recovers a subset-sum decomposition") {
  // Weights with a unique 0/1 combination reaching the target.
  IntegerSystem sys;
  sys.a = RealMatrix::Zero(1, 6);
  sys.a << 1, 2, 4, 8, 16, 32;
  sys.b = Eigen::VectorXd::Constant(1, 41.0);  // 1 + 8 + 32
  sys.lower = Eigen::VectorXi::Zero(6);
  sys.upper = Eigen::VectorXi::Ones(6);
  const LatticeSolveResult r = solve_integer_system(sys, SolverConfig{});
  REQUIRE(r.status == LatticeSolveStatus::Found);
  Eigen::VectorXi want(6);
  want << 1, 0, 0, 1, 0, 1;
  CHECK(r.x == want);
  CHECK(r.residual < 1e-6);
}

TEST_CASE("integer-system solver handles trigonometric rows") {
  // Line-sum style system: recover 7 nonnegative integers from two complex
  // exponential sums plus their total.
  const int n = 7;
  Eigen::VectorXi truth(n);
  truth << 3, 0, 5, 1, 0, 2, 4;
  IntegerSystem sys;
  sys.a = RealMatrix::Zero(5, n);
  sys.b = Eigen::VectorXd::Zero(5);
  int row = 0;
  for (const int u : {1, 3}) {
    for (int j = 1; j <= n; ++j) {
      sys.a(row, j - 1) = std::cos(2.0 * M_PI * u * j / n);
      sys.a(row + 1, j - 1) = std::sin(2.0 * M_PI * u * j / n);
    }
    for (int j = 1; j <= n; ++j) {
      sys.b(row) += truth(j - 1) * std::cos(2.0 * M_PI * u * j / n);
      sys.b(row + 1) += truth(j - 1) * std::sin(2.0 * M_PI * u * j / n);
    }
    row += 2;
  }
  sys.a.row(row).setOnes();
  sys.b(row) = truth.sum();
  sys.lower = Eigen::VectorXi::Zero(n);
  sys.upper = Eigen::VectorXi::Constant(n, n);
  const LatticeSolveResult r = solve_integer_system(sys, SolverConfig{});
  REQUIRE(r.status == LatticeSolveStatus::Found);
  CHECK(r.x == truth);
}

TEST_CASE("no-solution systems do not fabricate a candidate") {
  IntegerSystem sys;
  sys.a = RealMatrix::Zero(1, 3);
  sys.a << 2, 4, 6;
  sys.b = Eigen::VectorXd::Constant(1, 3.7);  // no integer combination nearby
  sys.lower = Eigen::VectorXi::Zero(3);
  sys.upper = Eigen::VectorXi::Ones(3);
  const LatticeSolveResult r = solve_integer_system(sys, SolverConfig{});
  CHECK(r.status != LatticeSolveStatus::Found);
}
