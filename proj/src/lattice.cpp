#include "bindeblur/lattice.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

namespace bindeblur {

namespace {

struct GramSchmidt {
  RealMatrix bstar;   // orthogonalized vectors, one per column
  RealMatrix mu;      // lower-triangular coefficients
  Eigen::VectorXd norms_sq;
};

GramSchmidt gram_schmidt(const RealMatrix& b) {
  const int n = static_cast<int>(b.cols());
  GramSchmidt gs;
  gs.bstar = b;
  gs.mu = RealMatrix::Identity(n, n);
  gs.norms_sq.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const double m =
          gs.norms_sq(j) > 0.0 ? b.col(i).dot(gs.bstar.col(j)) / gs.norms_sq(j) : 0.0;
      gs.mu(i, j) = m;
      gs.bstar.col(i) -= m * gs.bstar.col(j);
    }
    gs.norms_sq(i) = gs.bstar.col(i).squaredNorm();
    // Dependent only if the orthogonal component is zero up to the rounding
    // noise of the cancellations (proportional to the column magnitude, not
    // its square): legitimate reduced components can be many orders of
    // magnitude below the raw column norm.
    const double noise = 1e-12 * std::sqrt(std::max(1.0, b.col(i).squaredNorm()));
    if (!(gs.norms_sq(i) > noise * noise))
      throw DependentBasis("lll_reduce: basis vectors are linearly dependent");
  }
  return gs;
}

using BigInt = boost::multiprecision::cpp_int;

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

/// All-integer LLL (de Weger's variant): the basis columns stay integral and
/// the Gram-Schmidt state is carried exactly through the subdeterminants d_i
/// and the scaled coefficients lambda_ij = d_j * mu_ij, so the reduction
/// cannot be derailed by floating-point cancellation no matter how large the
/// dynamic range of the entries is.
class IntegerLll {
 public:
  IntegerLll(std::vector<std::vector<BigInt>> columns, double delta, double time_limit)
      : b_(std::move(columns)),
        n_(static_cast<int>(b_.size())),
        delta_num_(static_cast<long long>(std::llround(delta * 1000.0))),
        delta_den_(1000),
        time_limit_(time_limit) {}

  /// Runs the reduction; returns false on hitting the time limit.
  bool run() {
    initialize();
    const auto start = std::chrono::steady_clock::now();
    int k = 1;
    long long iterations = 0;
    while (k < n_) {
      if (++iterations % 128 == 0 && time_limit_ > 0.0) {
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start;
        if (elapsed.count() > time_limit_) return false;
      }
      reduce(k, k - 1);
      if (delta_den_ * (d_[k + 1] * d_[k - 1] + lam_[k][k - 1] * lam_[k][k - 1]) <
          delta_num_ * d_[k] * d_[k]) {
        swap_columns(k);
        k = std::max(1, k - 1);
      } else {
        for (int l = k - 2; l >= 0; --l) reduce(k, l);
        ++k;
      }
    }
    return true;
  }

  const std::vector<std::vector<BigInt>>& columns() const { return b_; }

 private:
  void initialize() {
    d_.assign(n_ + 1, BigInt(1));
    lam_.assign(n_, std::vector<BigInt>(n_, BigInt(0)));
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j <= i; ++j) {
        BigInt u = dot(b_[i], b_[j]);
        for (int k = 0; k < j; ++k)
          u = (d_[k + 1] * u - lam_[i][k] * lam_[j][k]) / d_[k];
        if (j < i) {
          lam_[i][j] = u;
        } else {
          if (u == 0)
            throw DependentBasis("lll_reduce: basis vectors are linearly dependent");
          d_[i + 1] = u;
        }
      }
    }
  }

  static BigInt dot(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
    BigInt s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }

  void reduce(int k, int l) {
    if (2 * abs(lam_[k][l]) <= d_[l + 1]) return;
    const BigInt q = floor_div(2 * lam_[k][l] + d_[l + 1], 2 * d_[l + 1]);
    for (std::size_t t = 0; t < b_[k].size(); ++t) b_[k][t] -= q * b_[l][t];
    lam_[k][l] -= q * d_[l + 1];
    for (int i = 0; i < l; ++i) lam_[k][i] -= q * lam_[l][i];
  }

  void swap_columns(int k) {
    std::swap(b_[k], b_[k - 1]);
    for (int j = 0; j < k - 1; ++j) std::swap(lam_[k][j], lam_[k - 1][j]);
    const BigInt lam = lam_[k][k - 1];
    const BigInt bnew = (d_[k - 1] * d_[k + 1] + lam * lam) / d_[k];
    for (int i = k + 1; i < n_; ++i) {
      const BigInt t = lam_[i][k];
      lam_[i][k] = (d_[k + 1] * lam_[i][k - 1] - lam * t) / d_[k];
      lam_[i][k - 1] = (bnew * t + lam * lam_[i][k]) / d_[k + 1];
    }
    d_[k] = bnew;
  }

  std::vector<std::vector<BigInt>> b_;
  int n_;
  BigInt delta_num_, delta_den_;
  double time_limit_;
  std::vector<BigInt> d_;
  std::vector<std::vector<BigInt>> lam_;
};

}  // namespace

LllOutcome lll_reduce(const LatticeBasis& basis, const LllOptions& options) {
  RealMatrix b = basis.vectors;
  const int n = static_cast<int>(b.cols());
  LllOutcome out;
  if (n <= 1) {
    if (n == 1) gram_schmidt(b);  // still reject a zero vector
    out.basis.vectors = std::move(b);
    return out;
  }

  const auto start = std::chrono::steady_clock::now();
  const auto expired = [&]() {
    if (options.time_limit <= 0.0) return false;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() > options.time_limit;
  };

  GramSchmidt gs = gram_schmidt(b);
  int k = 1;
  while (k < n) {
    if (expired()) {
      out.timed_out = true;
      break;
    }
    // Size reduction of column k against all earlier columns. The mu row of
    // column k must be updated as the subtractions happen; reducing against
    // column j changes the coefficients against every earlier column.
    bool reduced = false;
    for (int j = k - 1; j >= 0; --j) {
      const double q = std::round(gs.mu(k, j));
      if (q != 0.0) {
        b.col(k) -= q * b.col(j);
        for (int j2 = 0; j2 < j; ++j2) gs.mu(k, j2) -= q * gs.mu(j, j2);
        gs.mu(k, j) -= q;
        reduced = true;
      }
    }
    if (reduced) gs = gram_schmidt(b);

    const double lhs = gs.norms_sq(k);
    const double rhs =
        (options.delta - gs.mu(k, k - 1) * gs.mu(k, k - 1)) * gs.norms_sq(k - 1);
    if (lhs >= rhs) {
      ++k;
    } else {
      b.col(k).swap(b.col(k - 1));
      gs = gram_schmidt(b);
      k = std::max(1, k - 1);
    }
  }
  out.basis.vectors = std::move(b);
  return out;
}

LatticeBasis lll_reduce(const LatticeBasis& basis, double delta) {
  LllOptions options;
  options.delta = delta;
  return lll_reduce(basis, options).basis;
}

LatticeSolveResult solve_integer_system(const IntegerSystem& sys, const SolverConfig& cfg) {
  const int t = sys.var_count();
  const int m = sys.row_count();

  // Center the unknowns at the rounded minimum-norm least-squares solution
  // (clamped into the variable bounds). The reduction then looks for the
  // offset from that center, whose norm is far smaller than the norm of the
  // solution itself, which puts the true solution decisively below the
  // spurious near-null integer combinations in the lattice ordering.
  Eigen::VectorXd ls = sys.a.completeOrthogonalDecomposition().solve(sys.b);
  Eigen::VectorXi center(t);
  for (int j = 0; j < t; ++j) {
    double c = std::round(ls(j));
    c = std::min(c, static_cast<double>(sys.upper(j)));
    c = std::max(c, static_cast<double>(sys.lower(j)));
    center(j) = static_cast<int>(c);
  }
  const Eigen::VectorXd b_centered = sys.b - sys.a * center.cast<double>();

  // Weight the constraint rows so that the residual of the true solution
  // (data error times weight) has about the same norm as its offset block.
  // Larger weights drown the offset block in data error; smaller ones let
  // near-null integer combinations with slightly larger residuals compete.
  const double noise = std::max(cfg.noise_floor, 1e-15 * (1.0 + sys.b.norm()));
  const double beta =
      std::min(std::max(cfg.beta, std::sqrt(static_cast<double>(t)) / noise), 1e16);
  const double accept = std::max(cfg.epsilon, 8.0 * noise);

  std::vector<std::vector<BigInt>> columns(
      t + 1, std::vector<BigInt>(static_cast<std::size_t>(t + m + 1), BigInt(0)));
  for (int j = 0; j < t; ++j) {
    columns[j][j] = 1;
    for (int r = 0; r < m; ++r)
      columns[j][t + r] = static_cast<long long>(std::llround(beta * sys.a(r, j)));
  }
  for (int r = 0; r < m; ++r)
    columns[t][t + r] = -static_cast<long long>(std::llround(beta * b_centered(r)));
  const long long gamma =
      std::max<long long>(1, std::llround(cfg.tracking_weight));
  columns[t][t + m] = gamma;

  IntegerLll lll(std::move(columns), cfg.delta, cfg.time_limit);
  const bool completed = lll.run();

  LatticeSolveResult result;
  bool found = false;
  for (const auto& v : lll.columns()) {
    const BigInt& track = v[static_cast<std::size_t>(t + m)];
    if (track != gamma && track != -gamma) continue;
    const int sign = track == gamma ? 1 : -1;
    // Residual rows must already be short relative to the row weight.
    bool short_enough = true;
    for (int r = 0; r < m && short_enough; ++r)
      if (abs(v[static_cast<std::size_t>(t + r)]) >= BigInt(static_cast<long long>(
              std::ceil(beta * accept))))
        short_enough = false;
    if (!short_enough) continue;
    Eigen::VectorXi x(t);
    bool in_range = true;
    for (int i = 0; i < t && in_range; ++i) {
      const BigInt e = sign * v[static_cast<std::size_t>(i)];
      if (e > 1000000 || e < -1000000) in_range = false;
      else x(i) = center(i) + static_cast<int>(e.convert_to<long long>());
    }
    if (!in_range) continue;
    const double residual = sys.residual(x);
    if (residual >= accept) continue;
    if (!found || residual < result.residual) {
      result.x = std::move(x);
      result.residual = residual;
      found = true;
    }
  }
  if (found) {
    result.status = LatticeSolveStatus::Found;
  } else {
    result.status =
        completed ? LatticeSolveStatus::NoShortVector : LatticeSolveStatus::TimeLimit;
  }
  return result;
}

}  // namespace bindeblur
