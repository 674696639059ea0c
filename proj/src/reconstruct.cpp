#include "bindeblur/reconstruct.hpp"

#include "stacked_lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <vector>

namespace bindeblur {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int cell_index(int m, int n, int n2) { return (m - 1) * n2 + (n - 1); }

/// Rows of the stacked system over the N1*N2 binary unknowns, collected
/// incrementally before assembly into one IntegerSystem.
struct RowAccumulator {
  int var_count = 0;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;

  explicit RowAccumulator(int vars) : var_count(vars) {}

  Eigen::VectorXd& add(double b) {
    rows.emplace_back(Eigen::VectorXd::Zero(var_count));
    rhs.push_back(b);
    return rows.back();
  }

  IntegerSystem assemble() const {
    IntegerSystem sys;
    sys.a = RealMatrix::Zero(static_cast<int>(rows.size()), var_count);
    sys.b = Eigen::VectorXd::Zero(static_cast<int>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      sys.a.row(static_cast<int>(r)) = rows[r];
      sys.b(static_cast<int>(r)) = rhs[r];
    }
    sys.lower = Eigen::VectorXi::Zero(var_count);
    sys.upper = Eigen::VectorXi::Ones(var_count);
    return sys;
  }
};

/// Real/imaginary rows of one raw coefficient over the cell unknowns.
void add_raw_coefficient(RowAccumulator& acc, const BandedSpectrum& spec, int k, int l) {
  const int n1 = spec.n1(), n2 = spec.n2();
  const Complex v = spec.value(k, l);
  Eigen::VectorXd& re = acc.add(v.real());
  for (int m = 1; m <= n1; ++m)
    for (int n = 1; n <= n2; ++n)
      re(cell_index(m, n, n2)) =
          std::cos(2.0 * M_PI * (static_cast<double>(k) * m / n1 +
                                 static_cast<double>(l) * n / n2));
  Eigen::VectorXd& im = acc.add(v.imag());
  for (int m = 1; m <= n1; ++m)
    for (int n = 1; n <= n2; ++n)
      im(cell_index(m, n, n2)) =
          std::sin(2.0 * M_PI * (static_cast<double>(k) * m / n1 +
                                 static_cast<double>(l) * n / n2));
}

/// One summing row per line of the partition: the cells of label j total
/// sums(j-1).
void add_exact_block(RowAccumulator& acc, const LinePartition& part,
                     const Eigen::VectorXi& sums) {
  const int n = part.n;
  for (int j = 1; j <= n; ++j) acc.add(sums(j - 1));
  // One sweep over the grid fills all n freshly added rows.
  const std::size_t base = acc.rows.size() - static_cast<std::size_t>(n);
  for (int m = 1; m <= n; ++m)
    for (int c = 1; c <= n; ++c)
      acc.rows[base + part.label(m, c) - 1](cell_index(m, c, n)) = 1.0;
}

/// Constraint-block rows over line sums, mapped onto the cell unknowns. The
/// trailing popcount row is handled by the caller.
void add_constraint_block(RowAccumulator& acc, const LinePartition& part,
                          const RealMatrix& c_rows, const Eigen::VectorXd& c_rhs,
                          int row_count) {
  const int n = part.n;
  for (int r = 0; r < row_count; ++r) {
    Eigen::VectorXd& row = acc.add(c_rhs(r));
    for (int m = 1; m <= n; ++m)
      for (int c = 1; c <= n; ++c) {
        const double w = c_rows(r, part.label(m, c) - 1);
        if (w != 0.0) row(cell_index(m, c, n)) = w;
      }
  }
}

void add_popcount_row(RowAccumulator& acc, int s) { acc.add(s).setOnes(); }

BinaryMatrix matrix_from_cells(const Eigen::VectorXi& x, int n1, int n2) {
  BinaryMatrix out(n1, n2);
  for (int m = 1; m <= n1; ++m)
    for (int n = 1; n <= n2; ++n) out.set(m, n, x(cell_index(m, n, n2)));
  return out;
}

double band_residual(const BinaryMatrix& x, const BandedSpectrum& spec) {
  const BandedSpectrum full = dft_forward(x);
  double worst = 0.0;
  for (const auto& [k, l] : spec.band().indexes())
    worst = std::max(worst, std::abs(full.value(k, l) - spec.value(k, l)));
  return worst;
}

RecoveryStatus map_status(FeasibilityStatus status) {
  switch (status) {
    case FeasibilityStatus::Found:
      return RecoveryStatus::Recovered;
    case FeasibilityStatus::BudgetExhausted:
      return RecoveryStatus::BudgetExhausted;
    default:
      return RecoveryStatus::Inconsistent;
  }
}

/// Exact meet-in-the-middle solver for the final rectangular system: find the
/// binary matrix with the recovered column and row sums whose remaining
/// coefficient matches the data. A depth-first search over whole column
/// patterns would have to visit nearly every margin-consistent matrix
/// (billions at 7x11) because the two dense rows prune only near the bottom
/// of the tree; splitting the columns into a stored half and a streamed half
/// and joining on (residual row usage, partial coefficient value) brings the
/// cost down to roughly the square root of that count.
struct MitmOutcome {
  FeasibilityStatus status = FeasibilityStatus::Infeasible;
  Eigen::MatrixXi cells;  // n1 x n2, valid when status == Found
  long long nodes = 0;
};

class RectStackedMitm {
 public:
  RectStackedMitm(const BandedSpectrum& spec, const Eigen::VectorXi& column_sums,
                  const Eigen::VectorXi& row_sums, const SearchBudget& budget)
      : n1_(spec.n1()),
        n2_(spec.n2()),
        col_sums_(column_sums),
        row_sums_(row_sums),
        tol_(std::max(budget.tolerance, 1e-9)) {
    const Complex v = spec.value(1, 1);
    target_re_ = v.real();
    target_im_ = v.imag();
    wre_.resize(n1_, n2_);
    wim_.resize(n1_, n2_);
    for (int m = 1; m <= n1_; ++m)
      for (int n = 1; n <= n2_; ++n) {
        const double angle = 2.0 * M_PI * (static_cast<double>(m) / n1_ +
                                           static_cast<double>(n) / n2_);
        wre_(m - 1, n - 1) = std::cos(angle);
        wim_(m - 1, n - 1) = std::sin(angle);
      }
  }

  static bool applicable(int n1, int n2) { return n1 <= 15 && n2 >= 2; }

  MitmOutcome run() {
    MitmOutcome out;
    build_patterns();
    for (const auto& p : patterns_)
      if (p.empty()) return out;  // a column sum outside [0, n1]: no fill exists

    // Stored half: columns with the largest pattern counts, while the raw
    // product stays within the memory budget and the pattern indices still
    // pack into 64 bits.
    std::vector<int> order(n2_);
    for (int j = 0; j < n2_; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return patterns_[a].size() > patterns_[b].size();
    });
    double product = 1.0;
    int bits = 0;
    for (int j : order) {
      if (static_cast<int>(stored_cols_.size()) >= std::min(12, n2_ - 1)) break;
      int width = 1;
      while ((1u << width) < patterns_[j].size() + 1) ++width;
      if (product * static_cast<double>(patterns_[j].size()) > 2e7) break;
      if (bits + width > 64) break;
      product *= static_cast<double>(patterns_[j].size());
      bits += width;
      stored_widths_.push_back(width);
      stored_cols_.push_back(j);
    }
    for (int j : order)
      if (std::find(stored_cols_.begin(), stored_cols_.end(), j) == stored_cols_.end())
        streamed_cols_.push_back(j);
    // Streamed half: cheap levels first so capacity pruning binds early.
    std::sort(streamed_cols_.begin(), streamed_cols_.end(), [&](int a, int b) {
      return patterns_[a].size() < patterns_[b].size();
    });

    usage_.assign(n1_, 0);
    enumerate_stored(0);
    if (nodes_ > kNodeCap) {
      out.status = FeasibilityStatus::BudgetExhausted;
      out.nodes = nodes_;
      return out;
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.ukey != b.ukey ? a.ukey < b.ukey : a.re < b.re;
    });

    // Interval bounds for the streamed suffix plus the whole stored half.
    const int sn = static_cast<int>(streamed_cols_.size());
    suf_min_re_.assign(sn + 1, 0.0);
    suf_max_re_.assign(sn + 1, 0.0);
    suf_min_im_.assign(sn + 1, 0.0);
    suf_max_im_.assign(sn + 1, 0.0);
    double bmin_re = 1e300, bmax_re = -1e300, bmin_im = 1e300, bmax_im = -1e300;
    if (entries_.empty()) {
      bmin_re = bmax_re = bmin_im = bmax_im = 0.0;
      if (!stored_cols_.empty()) return out;  // nothing stored: infeasible
    }
    for (const Entry& e : entries_) {
      bmin_re = std::min(bmin_re, e.re);
      bmax_re = std::max(bmax_re, e.re);
      bmin_im = std::min(bmin_im, e.im);
      bmax_im = std::max(bmax_im, e.im);
    }
    suf_min_re_[sn] = bmin_re;
    suf_max_re_[sn] = bmax_re;
    suf_min_im_[sn] = bmin_im;
    suf_max_im_[sn] = bmax_im;
    for (int d = sn - 1; d >= 0; --d) {
      double mnr = 1e300, mxr = -1e300, mni = 1e300, mxi = -1e300;
      for (const Pattern& p : patterns_[streamed_cols_[d]]) {
        mnr = std::min(mnr, p.re);
        mxr = std::max(mxr, p.re);
        mni = std::min(mni, p.im);
        mxi = std::max(mxi, p.im);
      }
      suf_min_re_[d] = suf_min_re_[d + 1] + mnr;
      suf_max_re_[d] = suf_max_re_[d + 1] + mxr;
      suf_min_im_[d] = suf_min_im_[d + 1] + mni;
      suf_max_im_[d] = suf_max_im_[d + 1] + mxi;
    }

    streamed_choice_.assign(sn, 0);
    search_streamed(0, target_re_, target_im_);
    out.nodes = nodes_;
    if (nodes_ > kNodeCap) {
      out.status = FeasibilityStatus::BudgetExhausted;
      return out;
    }
    if (best_residual_ <= tol_) {
      out.status = FeasibilityStatus::Found;
      out.cells = best_cells_;
    }
    return out;
  }

 private:
  struct Pattern {
    std::uint32_t mask;
    double re, im;
  };
  struct Entry {
    std::uint64_t ukey;
    std::uint64_t pats;
    double re, im;
  };
  static constexpr long long kNodeCap = 4000000000LL;

  void build_patterns() {
    patterns_.resize(n2_);
    for (int j = 0; j < n2_; ++j) {
      const int weight = col_sums_(j);
      if (weight < 0 || weight > n1_) continue;
      for (std::uint32_t mask = 0; mask < (1u << n1_); ++mask) {
        if (__builtin_popcount(mask) != weight) continue;
        double re = 0.0, im = 0.0;
        std::uint32_t m = mask;
        while (m) {
          const int i = __builtin_ctz(m);
          m &= m - 1;
          re += wre_(i, j);
          im += wim_(i, j);
        }
        patterns_[j].push_back({mask, re, im});
      }
    }
  }

  std::uint64_t pack_usage(const std::vector<int>& u) const {
    std::uint64_t key = 0;
    for (int i = 0; i < n1_; ++i) key |= static_cast<std::uint64_t>(u[i]) << (4 * i);
    return key;
  }

  void enumerate_stored(int depth) {
    if (nodes_ > kNodeCap) return;
    const int sn = static_cast<int>(stored_cols_.size());
    if (depth == sn) {
      // The streamed half must be able to supply what is still missing.
      const int streamed_count = static_cast<int>(streamed_cols_.size());
      for (int i = 0; i < n1_; ++i)
        if (row_sums_(i) - usage_[i] > streamed_count) return;
      Entry e;
      e.ukey = pack_usage(usage_);
      e.pats = stored_pats_;
      e.re = partial_re_;
      e.im = partial_im_;
      entries_.push_back(e);
      return;
    }
    const int col = stored_cols_[depth];
    const int width = stored_widths_[depth];
    for (std::size_t pi = 0; pi < patterns_[col].size(); ++pi) {
      if (++nodes_ > kNodeCap) return;
      const Pattern& p = patterns_[col][pi];
      bool ok = true;
      std::uint32_t m = p.mask;
      while (m) {
        const int i = __builtin_ctz(m);
        m &= m - 1;
        if (usage_[i] + 1 > row_sums_(i)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      m = p.mask;
      while (m) {
        const int i = __builtin_ctz(m);
        m &= m - 1;
        ++usage_[i];
      }
      const std::uint64_t saved = stored_pats_;
      stored_pats_ |= static_cast<std::uint64_t>(pi) << stored_shift_;
      stored_shift_ += width;
      partial_re_ += p.re;
      partial_im_ += p.im;
      enumerate_stored(depth + 1);
      partial_re_ -= p.re;
      partial_im_ -= p.im;
      stored_shift_ -= width;
      stored_pats_ = saved;
      m = p.mask;
      while (m) {
        const int i = __builtin_ctz(m);
        m &= m - 1;
        --usage_[i];
      }
    }
  }

  void search_streamed(int depth, double need_re, double need_im) {
    if (nodes_ > kNodeCap || early_exit_) return;
    const int sn = static_cast<int>(streamed_cols_.size());
    if (need_re < suf_min_re_[depth] - tol_ || need_re > suf_max_re_[depth] + tol_) return;
    if (need_im < suf_min_im_[depth] - tol_ || need_im > suf_max_im_[depth] + tol_) return;
    if (depth == sn) {
      join(need_re, need_im);
      return;
    }
    const int col = streamed_cols_[depth];
    const int slack = (sn - depth - 1) + static_cast<int>(stored_cols_.size());
    for (std::size_t pi = 0; pi < patterns_[col].size(); ++pi) {
      if (++nodes_ > kNodeCap) return;
      const Pattern& p = patterns_[col][pi];
      bool ok = true;
      std::uint32_t m = p.mask;
      while (m) {
        const int i = __builtin_ctz(m);
        m &= m - 1;
        if (usage_[i] + 1 > row_sums_(i)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      m = p.mask;
      while (m) {
        const int i = __builtin_ctz(m);
        m &= m - 1;
        ++usage_[i];
      }
      for (int i = 0; i < n1_ && ok; ++i)
        if (row_sums_(i) - usage_[i] > slack) ok = false;
      if (ok) {
        streamed_choice_[depth] = static_cast<int>(pi);
        search_streamed(depth + 1, need_re - p.re, need_im - p.im);
      }
      m = p.mask;
      while (m) {
        const int i = __builtin_ctz(m);
        m &= m - 1;
        --usage_[i];
      }
      if (early_exit_) return;
    }
  }

  void join(double need_re, double need_im) {
    std::vector<int> complement(n1_);
    for (int i = 0; i < n1_; ++i) {
      complement[i] = row_sums_(i) - usage_[i];
      if (complement[i] < 0 || complement[i] > 15) return;
    }
    const std::uint64_t key = pack_usage(complement);
    Entry probe;
    probe.ukey = key;
    probe.re = need_re - tol_;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), probe,
                               [](const Entry& a, const Entry& b) {
                                 return a.ukey != b.ukey ? a.ukey < b.ukey : a.re < b.re;
                               });
    for (; it != entries_.end() && it->ukey == key && it->re <= need_re + tol_; ++it) {
      ++nodes_;
      if (std::abs(it->im - need_im) > tol_) continue;
      const double residual =
          std::max(std::abs(it->re - need_re), std::abs(it->im - need_im));
      if (residual < best_residual_) {
        best_residual_ = residual;
        assemble(*it);
        if (residual < 1e-9) early_exit_ = true;
      }
    }
  }

  void assemble(const Entry& entry) {
    best_cells_ = Eigen::MatrixXi::Zero(n1_, n2_);
    for (std::size_t d = 0; d < streamed_cols_.size(); ++d) {
      const int col = streamed_cols_[d];
      const std::uint32_t mask = patterns_[col][streamed_choice_[d]].mask;
      for (int i = 0; i < n1_; ++i) best_cells_(i, col) = (mask >> i) & 1;
    }
    std::uint64_t pats = entry.pats;
    for (std::size_t d = 0; d < stored_cols_.size(); ++d) {
      const int col = stored_cols_[d];
      const int width = stored_widths_[d];
      const std::uint64_t pi = pats & ((1ull << width) - 1);
      pats >>= width;
      const std::uint32_t mask = patterns_[col][pi].mask;
      for (int i = 0; i < n1_; ++i) best_cells_(i, col) = (mask >> i) & 1;
    }
  }

  int n1_, n2_;
  Eigen::VectorXi col_sums_, row_sums_;
  double tol_;
  double target_re_ = 0.0, target_im_ = 0.0;
  RealMatrix wre_, wim_;
  std::vector<std::vector<Pattern>> patterns_;
  std::vector<int> stored_cols_, streamed_cols_, stored_widths_;
  std::vector<int> usage_;
  std::vector<Entry> entries_;
  std::vector<double> suf_min_re_, suf_max_re_, suf_min_im_, suf_max_im_;
  std::vector<int> streamed_choice_;
  std::uint64_t stored_pats_ = 0;
  int stored_shift_ = 0;
  double partial_re_ = 0.0, partial_im_ = 0.0;
  long long nodes_ = 0;
  bool early_exit_ = false;
  double best_residual_ = 1e300;
  Eigen::MatrixXi best_cells_;
};

/// Sum-recovery subproblem shared by the rectangular row/column solves:
/// unknowns are the line sums of the (k, l) partition read off one
/// coefficient plus the popcount.
FeasibilityResult solve_axis_sums(const BandedSpectrum& spec, int k, int l, int count,
                                  int capacity, const SearchBudget& budget) {
  IntegerSystem sys;
  sys.a = RealMatrix::Zero(3, count);
  sys.b = Eigen::VectorXd::Zero(3);
  const Complex v = spec.value(k, l);
  for (int j = 1; j <= count; ++j) {
    const double angle = 2.0 * M_PI * static_cast<double>(j) / count;
    sys.a(0, j - 1) = std::cos(angle);
    sys.a(1, j - 1) = std::sin(angle);
  }
  sys.b(0) = v.real();
  sys.b(1) = v.imag();
  sys.a.row(2).setOnes();
  sys.b(2) = spec.popcount();
  sys.lower = Eigen::VectorXi::Zero(count);
  sys.upper = Eigen::VectorXi::Constant(count, capacity);
  return solve_feasibility(sys, budget);
}

DirectionOutcome outcome_of(const DirectionalData& data) {
  DirectionOutcome out;
  out.direction = data.direction;
  out.kind = data.kind;
  out.residual = data.residual;
  out.elapsed = data.elapsed;
  return out;
}

/// Shared stacked-solve driver for the square shapes, with the optional
/// drop-worst-direction retry loop.
RecoveryReport run_stacked(const BandedSpectrum& spec, std::vector<DirectionalData> datas,
                           bool need_popcount_row,
                           const std::vector<IndexPair>& extra_raw,
                           const SearchBudget& budget, const RecoveryOptions& options,
                           Clock::time_point start) {
  const int n = spec.n1();
  RecoveryReport report;

  int allowed_retries = 0;
  if (options.retry_directions) {
    int recovered = 0;
    for (const auto& d : datas)
      if (d.kind == DirectionalKind::ExactSums) ++recovered;
    allowed_retries = options.max_retries > 0 ? options.max_retries : recovered;
  }

  while (true) {
    RowAccumulator acc(n * n);
    bool have_exact = false;
    for (const auto& data : datas) {
      if (data.kind == DirectionalKind::ExactSums) {
        add_exact_block(acc, data.direction.partition(), data.sums);
        have_exact = true;
      } else if (data.kind == DirectionalKind::ConstraintBlock) {
        // The trailing row of the block is the popcount, added once globally.
        add_constraint_block(acc, data.direction.partition(), data.constraint_rows,
                             data.constraint_rhs,
                             static_cast<int>(data.constraint_rows.rows()) - 1);
      } else {
        for (const auto& member : data.direction.members)
          add_raw_coefficient(acc, spec, member.first, member.second);
      }
    }
    for (const auto& [k, l] : extra_raw) add_raw_coefficient(acc, spec, k, l);
    if (!have_exact || need_popcount_row) add_popcount_row(acc, spec.popcount());

    const IntegerSystem sys = acc.assemble();
    // Interval branch and bound handles the small stacked systems; the big
    // square ones have line-sum structure that only LP pruning cuts through.
    const FeasibilityResult solved =
        sys.var_count() > 100 ? solve_stacked_lp(sys, budget) : solve_feasibility(sys, budget);
    report.stacked_node_count += solved.node_count;
    report.status = map_status(solved.status);

    if (report.status == RecoveryStatus::Inconsistent && allowed_retries > 0) {
      // Drop the recovered direction with the worst solve residual and try
      // again with its coefficients as raw rows.
      int worst = -1;
      for (std::size_t i = 0; i < datas.size(); ++i) {
        if (datas[i].kind != DirectionalKind::ExactSums) continue;
        if (worst < 0 || datas[i].residual > datas[worst].residual)
          worst = static_cast<int>(i);
      }
      if (worst >= 0) {
        datas[static_cast<std::size_t>(worst)].kind =
            DirectionalKind::SkippedRawCoefficients;
        --allowed_retries;
        ++report.retries_used;
        continue;
      }
    }

    if (report.status == RecoveryStatus::Recovered) {
      report.matrix = matrix_from_cells(solved.x, n, n);
      const double verify_tol = std::max(budget.tolerance, 1e-6) * 4.0;
      if (band_residual(report.matrix, spec) > std::max(verify_tol, 1e-3))
        report.status = RecoveryStatus::Inconsistent;
    }
    break;
  }

  for (const auto& data : datas) report.per_direction.push_back(outcome_of(data));
  if (report.status == RecoveryStatus::Inconsistent) {
    // Surface retry candidates first: recovered directions by descending
    // solve residual.
    std::stable_sort(report.per_direction.begin(), report.per_direction.end(),
                     [](const DirectionOutcome& a, const DirectionOutcome& b) {
                       const bool ea = a.kind == DirectionalKind::ExactSums;
                       const bool eb = b.kind == DirectionalKind::ExactSums;
                       if (ea != eb) return ea;
                       return a.residual > b.residual;
                     });
  }
  report.total_elapsed = seconds_since(start);
  return report;
}

}  // namespace

Band minimal_band(int n1, int n2) {
  if (n1 != n2) {
    if (is_prime(n1) && is_prime(n2)) return Band::rect4();
    throw UnsupportedDims("minimal_band: rectangular dims must be distinct primes");
  }
  if (is_prime(n1)) return Band::square(static_cast<int>(std::floor(std::sqrt(n1))));
  const auto [p, alpha] = prime_power_decompose(n1);
  if (alpha >= 2) {
    int l0 = 1;
    for (int i = 1; i < alpha; ++i) l0 *= p;
    return Band::square(l0);
  }
  throw UnsupportedDims("minimal_band: square dims must be a prime or a prime power");
}

RecoveryReport recover_rect(const BandedSpectrum& spec, const SearchBudget& budget,
                            const RecoveryOptions& options) {
  (void)options;  // no directional retry applies to the two-sum route
  const auto start = Clock::now();
  const int n1 = spec.n1(), n2 = spec.n2();
  RecoveryReport report;

  const bool skip_columns = n2 > 2 * n1;
  const bool skip_rows = n1 > 2 * n2;

  Eigen::VectorXi column_sums, row_sums;
  bool have_columns = false, have_rows = false;

  const auto record = [&](int k, int l, int count, int capacity, DirectionalKind kind) {
    DirectionOutcome out;
    out.direction.k = k;
    out.direction.l = l;
    out.direction.members = {{k, l}};
    out.direction.m_count = 1;
    out.direction.line_count = count;
    out.direction.line_capacity = capacity;
    out.kind = kind;
    report.per_direction.push_back(out);
  };

  if (!skip_columns) {
    const FeasibilityResult solved = solve_axis_sums(spec, 0, 1, n2, n1, budget);
    report.stacked_node_count += solved.node_count;
    if (solved.status != FeasibilityStatus::Found) {
      report.status = map_status(solved.status);
      record(0, 1, n2, n1, DirectionalKind::SkippedRawCoefficients);
      report.total_elapsed = seconds_since(start);
      return report;
    }
    column_sums = solved.x;
    have_columns = true;
    record(0, 1, n2, n1, DirectionalKind::ExactSums);
  } else {
    record(0, 1, n2, n1, DirectionalKind::SkippedRawCoefficients);
  }

  if (!skip_rows) {
    const FeasibilityResult solved = solve_axis_sums(spec, 1, 0, n1, n2, budget);
    report.stacked_node_count += solved.node_count;
    if (solved.status != FeasibilityStatus::Found) {
      report.status = map_status(solved.status);
      record(1, 0, n1, n2, DirectionalKind::SkippedRawCoefficients);
      report.total_elapsed = seconds_since(start);
      return report;
    }
    row_sums = solved.x;
    have_rows = true;
    record(1, 0, n1, n2, DirectionalKind::ExactSums);
  } else {
    record(1, 0, n1, n2, DirectionalKind::SkippedRawCoefficients);
  }

  if (have_columns && have_rows && RectStackedMitm::applicable(n1, n2)) {
    // With both margins in hand the remaining system is margins plus one
    // dense coefficient; the meet-in-the-middle split solves it exactly and
    // orders of magnitude faster than branch and bound on the cell grid.
    RectStackedMitm mitm(spec, column_sums, row_sums, budget);
    const MitmOutcome solved = mitm.run();
    report.stacked_node_count += solved.nodes;
    report.status = map_status(solved.status);
    if (report.status == RecoveryStatus::Recovered) {
      BinaryMatrix matrix(n1, n2);
      for (int m = 1; m <= n1; ++m)
        for (int n = 1; n <= n2; ++n) matrix.set(m, n, solved.cells(m - 1, n - 1));
      report.matrix = matrix;
      if (band_residual(report.matrix, spec) > std::max(budget.tolerance * 4.0, 1e-3))
        report.status = RecoveryStatus::Inconsistent;
    }
    report.total_elapsed = seconds_since(start);
    return report;
  }

  RowAccumulator acc(n1 * n2);
  if (have_columns) {
    for (int n = 1; n <= n2; ++n) {
      Eigen::VectorXd& row = acc.add(column_sums(n - 1));
      for (int m = 1; m <= n1; ++m) row(cell_index(m, n, n2)) = 1.0;
    }
  } else {
    add_raw_coefficient(acc, spec, 0, 1);
  }
  if (have_rows) {
    for (int m = 1; m <= n1; ++m) {
      Eigen::VectorXd& row = acc.add(row_sums(m - 1));
      for (int n = 1; n <= n2; ++n) row(cell_index(m, n, n2)) = 1.0;
    }
  } else {
    add_raw_coefficient(acc, spec, 1, 0);
  }
  add_raw_coefficient(acc, spec, 1, 1);
  if (!have_columns && !have_rows) add_popcount_row(acc, spec.popcount());

  const FeasibilityResult solved = solve_feasibility(acc.assemble(), budget);
  report.stacked_node_count += solved.node_count;
  report.status = map_status(solved.status);
  if (report.status == RecoveryStatus::Recovered) {
    report.matrix = matrix_from_cells(solved.x, n1, n2);
    if (band_residual(report.matrix, spec) > std::max(budget.tolerance * 4.0, 1e-3))
      report.status = RecoveryStatus::Inconsistent;
  }
  report.total_elapsed = seconds_since(start);
  return report;
}

RecoveryReport recover_square_prime(const BandedSpectrum& spec, const SolverConfig& cfg,
                                    const SearchBudget& budget,
                                    const RecoveryOptions& options) {
  const auto start = Clock::now();
  const int n = spec.n1();

  std::vector<DirectionalData> datas;
  for (const DirectionClass& dir : canonical_directions(n, spec.band())) {
    if (dir.m_count >= 2) {
      datas.push_back(recover_direction_sums(spec, dir, cfg));
    } else {
      DirectionalData data;
      data.direction = dir;
      data.kind = DirectionalKind::SkippedRawCoefficients;
      datas.push_back(std::move(data));
    }
  }
  return run_stacked(spec, std::move(datas), false, {}, budget, options, start);
}

RecoveryReport recover_prime_power(const BandedSpectrum& spec, const SolverConfig& cfg,
                                   const SearchBudget& budget,
                                   const RecoveryOptions& options) {
  const auto start = Clock::now();
  const int n = spec.n1();
  const auto [p, alpha] = prime_power_decompose(n);
  if (alpha != 2)
    throw UnsupportedDims("recover_prime_power: only squared-prime dims are supported");

  const std::vector<IndexPair> axes = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  std::vector<DirectionalData> datas;
  std::vector<IndexPair> consumed_coarse;
  for (const IndexPair& axis : axes) {
    try {
      DirectionalData data = recover_coarse_then_fine(spec, p, axis, cfg);
      consumed_coarse.emplace_back(p * axis.first, p * axis.second);
      datas.push_back(std::move(data));
    } catch (const UnstableCoarseSolve&) {
      // Fall back to raw rows for everything this axis would have consumed.
      DirectionalData data;
      data.direction.k = axis.first;
      data.direction.l = axis.second;
      data.direction.line_count = n;
      data.direction.line_capacity = n;
      data.kind = DirectionalKind::SkippedRawCoefficients;
      for (const auto& rep : spec.band().free_representatives()) {
        if (rep.first == 0 && rep.second == 0) continue;
        if (slope_equivalent(n, axis, rep)) data.direction.members.push_back(rep);
      }
      data.direction.m_count = static_cast<int>(data.direction.members.size());
      consumed_coarse.emplace_back(p * axis.first, p * axis.second);
      datas.push_back(std::move(data));
    }
  }

  for (const DirectionClass& dir : prime_power_directions(p, alpha, spec.band())) {
    const bool is_axis =
        std::any_of(axes.begin(), axes.end(), [&](IndexPair a) {
          return a.first == dir.k && a.second == dir.l;
        });
    if (is_axis) continue;
    if (dir.m_count >= 2) {
      datas.push_back(extract_constraint_block(spec, p, dir, cfg));
    } else {
      DirectionalData data;
      data.direction = dir;
      data.kind = DirectionalKind::SkippedRawCoefficients;
      datas.push_back(std::move(data));
    }
  }

  // Coefficients with both indexes divisible by p that no coarse solve
  // consumed still carry information: keep them as raw rows.
  std::vector<IndexPair> extra_raw;
  for (const auto& rep : spec.band().free_representatives()) {
    const auto [k, l] = rep;
    if (k == 0 && l == 0) continue;
    if (mod_positive(k, p) != 0 || mod_positive(l, p) != 0) continue;
    bool consumed = false;
    for (const auto& c : consumed_coarse) {
      if ((c.first == k && c.second == l) || (c.first == -k && c.second == -l)) {
        consumed = true;
        break;
      }
    }
    if (!consumed) extra_raw.push_back(rep);
  }
  return run_stacked(spec, std::move(datas), false, extra_raw, budget, options, start);
}

RecoveryReport recover(const BandedSpectrum& spec, const SolverConfig& cfg,
                       const SearchBudget& budget, const RecoveryOptions& options) {
  const int n1 = spec.n1(), n2 = spec.n2();
  if (n1 != n2) {
    if (is_prime(n1) && is_prime(n2)) return recover_rect(spec, budget, options);
    throw UnsupportedDims("recover: rectangular dims must be distinct primes");
  }
  if (is_prime(n1)) return recover_square_prime(spec, cfg, budget, options);
  const auto [p, alpha] = prime_power_decompose(n1);
  if (alpha == 2) return recover_prime_power(spec, cfg, budget, options);
  throw UnsupportedDims("recover: unsupported dimension shape");
}

}  // namespace bindeblur
