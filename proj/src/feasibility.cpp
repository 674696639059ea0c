#include "bindeblur/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bindeblur {

double IntegerSystem::residual(const Eigen::VectorXi& x) const {
  if (row_count() == 0) return 0.0;
  const Eigen::VectorXd r = a * x.cast<double>() - b;
  return r.cwiseAbs().maxCoeff();
}

bool IntegerSystem::within_bounds(const Eigen::VectorXi& x) const {
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

namespace {

struct Entry {
  int var;
  double coef;
};

class Solver {
 public:
  Solver(const IntegerSystem& sys, const SearchBudget& budget)
      : sys_(sys), budget_(budget), var_count_(sys.var_count()) {
    lo_.resize(var_count_);
    hi_.resize(var_count_);
    for (int v = 0; v < var_count_; ++v) {
      lo_[v] = sys.lower(v);
      hi_[v] = sys.upper(v);
    }
    const int rows = sys.row_count();
    row_entries_.resize(rows);
    var_rows_.resize(var_count_);
    weight_.assign(var_count_, 0.0);
    for (int r = 0; r < rows; ++r) {
      for (int v = 0; v < var_count_; ++v) {
        const double a = sys.a(r, v);
        // Trig-generated rows carry zeros contaminated by rounding
        // (e.g. sin of a multiple of 2*pi); treat them as structural zeros
        // so the bound division below stays well-conditioned.
        if (std::abs(a) > 1e-12) {
          row_entries_[r].push_back({v, a});
          var_rows_[v].push_back(r);
          weight_[v] += std::abs(a);
        }
      }
    }
    row_min_.assign(rows, 0.0);
    row_max_.assign(rows, 0.0);
    for (int r = 0; r < rows; ++r) {
      for (const Entry& e : row_entries_[r]) {
        const double a = e.coef * lo_[e.var], b = e.coef * hi_[e.var];
        row_min_[r] += std::min(a, b);
        row_max_[r] += std::max(a, b);
      }
    }
  }

  FeasibilityResult run() {
    FeasibilityResult result;
    if (var_count_ == 0) {
      result.status = root_feasible() ? FeasibilityStatus::Found : FeasibilityStatus::Infeasible;
      result.x = Eigen::VectorXi();
      return result;
    }
    for (int v = 0; v < var_count_; ++v) {
      if (lo_[v] > hi_[v]) {
        result.status = FeasibilityStatus::Infeasible;
        return result;
      }
    }
    dirty_.assign(sys_.row_count(), true);
    for (int r = 0; r < sys_.row_count(); ++r) queue_.push_back(r);
    bool ok = propagate();
    if (!ok) {
      result.status = FeasibilityStatus::Infeasible;
      result.node_count = nodes_;
      return result;
    }
    const SearchOutcome outcome = search();
    result.node_count = nodes_;
    if (outcome == SearchOutcome::Found) {
      result.status = FeasibilityStatus::Found;
      result.x.resize(var_count_);
      for (int v = 0; v < var_count_; ++v) result.x(v) = lo_[v];
      // Soundness: the candidate must re-verify against the raw system.
      if (!sys_.within_bounds(result.x) || sys_.residual(result.x) > budget_.tolerance + 1e-12)
        result.status = FeasibilityStatus::Infeasible;
    } else if (outcome == SearchOutcome::Budget) {
      result.status = FeasibilityStatus::BudgetExhausted;
    } else {
      result.status = FeasibilityStatus::Infeasible;
    }
    return result;
  }

 private:
  enum class SearchOutcome { Found, Exhausted, Budget };

  bool root_feasible() {
    for (int r = 0; r < sys_.row_count(); ++r)
      if (std::abs(sys_.b(r)) > budget_.tolerance) return false;
    return true;
  }

  struct TrailEntry {
    int var;
    int old_lo, old_hi;
  };

  void apply_bounds(int v, int new_lo, int new_hi) {
    trail_.push_back({v, lo_[v], hi_[v]});
    for (int r : var_rows_[v]) {
      const double a = coef_of(r, v);
      const double old_min = std::min(a * lo_[v], a * hi_[v]);
      const double old_max = std::max(a * lo_[v], a * hi_[v]);
      const double nmin = std::min(a * new_lo, a * new_hi);
      const double nmax = std::max(a * new_lo, a * new_hi);
      row_min_[r] += nmin - old_min;
      row_max_[r] += nmax - old_max;
      if (!dirty_[r]) {
        dirty_[r] = true;
        queue_.push_back(r);
      }
    }
    lo_[v] = new_lo;
    hi_[v] = new_hi;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const TrailEntry t = trail_.back();
      trail_.pop_back();
      for (int r : var_rows_[t.var]) {
        const double a = coef_of(r, t.var);
        const double cur_min = std::min(a * lo_[t.var], a * hi_[t.var]);
        const double cur_max = std::max(a * lo_[t.var], a * hi_[t.var]);
        const double old_min = std::min(a * t.old_lo, a * t.old_hi);
        const double old_max = std::max(a * t.old_lo, a * t.old_hi);
        row_min_[r] += old_min - cur_min;
        row_max_[r] += old_max - cur_max;
      }
      lo_[t.var] = t.old_lo;
      hi_[t.var] = t.old_hi;
    }
  }

  double coef_of(int r, int v) const {
    for (const Entry& e : row_entries_[r])
      if (e.var == v) return e.coef;
    return 0.0;
  }

  /// Interval-consistency propagation to a fixpoint. Returns false on a
  /// detected contradiction.
  bool propagate() {
    const double tol = budget_.tolerance;
    while (!queue_.empty()) {
      const int r = queue_.back();
      queue_.pop_back();
      dirty_[r] = false;
      const double target = sys_.b(r);
      if (target < row_min_[r] - tol || target > row_max_[r] + tol) {
        clear_queue();
        return false;
      }
      for (const Entry& e : row_entries_[r]) {
        const int v = e.var;
        if (lo_[v] == hi_[v]) continue;
        const double a = e.coef;
        const double self_min = std::min(a * lo_[v], a * hi_[v]);
        const double self_max = std::max(a * lo_[v], a * hi_[v]);
        const double others_min = row_min_[r] - self_min;
        const double others_max = row_max_[r] - self_max;
        // a * x must lie within [target - others_max - tol, target - others_min + tol].
        const double lo_term = target - others_max - tol;
        const double hi_term = target - others_min + tol;
        // Clamp before casting: the quotient can be huge for small |a|.
        const auto as_lo = [](double q) {
          return static_cast<int>(std::ceil(std::clamp(q, -1e9, 1e9) - 1e-9));
        };
        const auto as_hi = [](double q) {
          return static_cast<int>(std::floor(std::clamp(q, -1e9, 1e9) + 1e-9));
        };
        int new_lo = lo_[v], new_hi = hi_[v];
        if (a > 0.0) {
          new_lo = std::max(new_lo, as_lo(lo_term / a));
          new_hi = std::min(new_hi, as_hi(hi_term / a));
        } else {
          new_lo = std::max(new_lo, as_lo(hi_term / a));
          new_hi = std::min(new_hi, as_hi(lo_term / a));
        }
        if (new_lo > new_hi) {
          clear_queue();
          return false;
        }
        if (new_lo > lo_[v] || new_hi < hi_[v]) apply_bounds(v, new_lo, new_hi);
      }
    }
    return true;
  }

  void clear_queue() {
    for (int r : queue_) dirty_[r] = false;
    queue_.clear();
  }

  int pick_variable() const {
    int best = -1;
    long long best_domain = std::numeric_limits<long long>::max();
    double best_weight = -1.0;
    for (int v = 0; v < var_count_; ++v) {
      if (lo_[v] == hi_[v]) continue;
      const long long domain = static_cast<long long>(hi_[v]) - lo_[v] + 1;
      if (domain < best_domain ||
          (domain == best_domain && weight_[v] > best_weight)) {
        best = v;
        best_domain = domain;
        best_weight = weight_[v];
      }
    }
    return best;
  }

  SearchOutcome search() {
    const int v = pick_variable();
    if (v < 0) return SearchOutcome::Found;  // all fixed; rows verified by propagation
    const int lo = lo_[v], hi = hi_[v];
    bool budget_hit = false;
    for (int val = lo; val <= hi; ++val) {
      if (++nodes_ > budget_.node_limit) return SearchOutcome::Budget;
      const std::size_t mark = trail_.size();
      apply_bounds(v, val, val);
      if (propagate()) {
        const SearchOutcome sub = search();
        if (sub == SearchOutcome::Found) return sub;
        if (sub == SearchOutcome::Budget) budget_hit = true;
      }
      undo_to(mark);
      if (budget_hit) return SearchOutcome::Budget;
    }
    return SearchOutcome::Exhausted;
  }

  const IntegerSystem& sys_;
  const SearchBudget& budget_;
  int var_count_;
  std::vector<int> lo_, hi_;
  std::vector<std::vector<Entry>> row_entries_;
  std::vector<std::vector<int>> var_rows_;
  std::vector<double> weight_;
  std::vector<double> row_min_, row_max_;
  std::vector<TrailEntry> trail_;
  std::vector<int> queue_;
  std::vector<bool> dirty_;
  long long nodes_ = 0;
};

}  // namespace

FeasibilityResult solve_feasibility(const IntegerSystem& sys, const SearchBudget& budget) {
  Solver solver(sys, budget);
  return solver.run();
}

}  // namespace bindeblur
