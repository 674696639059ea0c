#include "stacked_lp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace bindeblur {

namespace {

/// Bounded-variable phase-1 simplex for the feasibility of
///   A x = b (each row softened by a slack in [-row_tol, row_tol]),
///   lower <= x <= upper.
/// One artificial variable per row carries the initial infeasibility; their
/// sum is minimized, and the system is LP-feasible iff the minimum is ~0.
class Phase1Simplex {
 public:
  enum class Status { Feasible, Infeasible, Stalled };

  Phase1Simplex(const RealMatrix& a, const Eigen::VectorXd& b, double row_tol)
      : a_(a),
        b_(b),
        m_(static_cast<int>(a.rows())),
        n_(static_cast<int>(a.cols())),
        row_tol_(row_tol) {}

  /// Variables: [0, n) structural, [n, n+m) row slacks, [n+m, n+2m) artificials.
  Status solve(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
               Eigen::VectorXd& x_out) {
    lb_.resize(n_ + 2 * m_);
    ub_.resize(n_ + 2 * m_);
    lb_.head(n_) = lower;
    ub_.head(n_) = upper;
    lb_.segment(n_, m_).setConstant(-row_tol_);
    ub_.segment(n_, m_).setConstant(row_tol_);
    lb_.tail(m_).setZero();
    ub_.tail(m_).setConstant(std::numeric_limits<double>::infinity());

    // Structurals start at the bound nearest the midpoint heuristic value;
    // artificials absorb the residual with the matching sign.
    at_upper_.assign(n_ + 2 * m_, false);
    basic_.assign(n_ + 2 * m_, false);
    blocked_.assign(n_ + 2 * m_, false);
    Eigen::VectorXd xn = lb_.head(n_);
    for (int j = 0; j < n_; ++j) at_upper_[j] = false;
    Eigen::VectorXd resid = b_ - a_ * xn;
    art_sign_.resize(m_);
    basis_.resize(m_);
    xb_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      art_sign_(r) = resid(r) >= 0.0 ? 1.0 : -1.0;
      basis_[r] = n_ + m_ + r;
      basic_[n_ + m_ + r] = true;
      xb_(r) = std::abs(resid(r));
    }
    binv_ = RealMatrix::Zero(m_, m_);
    for (int r = 0; r < m_; ++r) binv_(r, r) = art_sign_(r);

    const double feas_tol = 1e-7 * (1.0 + b_.cwiseAbs().maxCoeff());
    const long long iter_cap = 40LL * (m_ + n_) + 2000;
    int degenerate_streak = 0;
    for (long long iter = 0; iter < iter_cap; ++iter) {
      // Duals of the artificial cost vector.
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
      for (int r = 0; r < m_; ++r)
        if (basis_[r] >= n_ + m_) y += binv_.row(r).transpose();

      // Price nonbasic structurals and slacks.
      const bool bland = degenerate_streak > 2 * m_;
      const Eigen::VectorXd d_struct = -(y.transpose() * a_).transpose();
      int enter = -1;
      double best = 1e-9;
      int enter_dir = 0;
      for (int j = 0; j < n_ + m_; ++j) {
        if (basic_[j] || blocked_[j] || lb_(j) == ub_(j)) continue;
        const double d = j < n_ ? d_struct(j) : -y(j - n_);
        if (!at_upper_[j] && d < -best) {
          enter = j;
          enter_dir = 1;
          if (bland) break;
          best = -d;
        } else if (at_upper_[j] && d > best) {
          enter = j;
          enter_dir = -1;
          if (bland) break;
          best = d;
        }
      }

      double obj = 0.0;
      for (int r = 0; r < m_; ++r)
        if (basis_[r] >= n_ + m_) obj += xb_(r);
      if (enter < 0) {
        return finish(obj, feas_tol, x_out) ? Status::Feasible : Status::Infeasible;
      }
      if (obj <= feas_tol * 0.01) {
        return finish(obj, feas_tol, x_out) ? Status::Feasible : Status::Infeasible;
      }

      // Ratio test along the entering direction.
      const Eigen::VectorXd w = binv_ * column(enter) * static_cast<double>(enter_dir);
      double t_max = ub_(enter) - lb_(enter);  // bound-to-bound flip
      int leave = -1;
      double leave_bound = 0.0;
      for (int r = 0; r < m_; ++r) {
        const int jb = basis_[r];
        // Tiny negative ratios are rounding drift past a bound: treat as a
        // degenerate (zero-length) step rather than a failure.
        if (w(r) > 1e-10) {
          const double t = std::max((xb_(r) - lb_(jb)) / w(r), 0.0);
          if (t < t_max - 1e-12) {
            t_max = t;
            leave = r;
            leave_bound = lb_(jb);
          }
        } else if (w(r) < -1e-10 && std::isfinite(ub_(jb))) {
          const double t = std::max((xb_(r) - ub_(jb)) / w(r), 0.0);
          if (t < t_max - 1e-12) {
            t_max = t;
            leave = r;
            leave_bound = ub_(jb);
          }
        }
      }
      if (!std::isfinite(t_max) || t_max < 0.0) return Status::Stalled;
      degenerate_streak = t_max < 1e-12 ? degenerate_streak + 1 : 0;

      xb_ -= t_max * w;
      if (leave < 0) {
        // Bound flip: entering variable crosses to its other bound.
        at_upper_[enter] = enter_dir > 0;
        continue;
      }
      const int out = basis_[leave];
      basic_[out] = false;
      at_upper_[out] = std::isfinite(ub_(out)) && leave_bound == ub_(out);
      if (out >= n_ + m_) blocked_[out] = true;  // artificials never re-enter
      const double enter_value =
          (enter_dir > 0 ? (at_upper_[enter] ? ub_(enter) : lb_(enter)) + t_max
                         : (at_upper_[enter] ? ub_(enter) : lb_(enter)) - t_max);
      basis_[leave] = enter;
      basic_[enter] = true;
      xb_(leave) = enter_value;
      // Eta update of the inverse.
      Eigen::VectorXd col = binv_ * column(enter);
      const double pivot = col(leave);
      if (std::abs(pivot) < 1e-11) return Status::Stalled;
      binv_.row(leave) /= pivot;
      for (int r = 0; r < m_; ++r) {
        if (r == leave) continue;
        if (col(r) != 0.0) binv_.row(r) -= col(r) * binv_.row(leave);
      }
      if (++pivots_since_refactor_ >= 256) refactor();
    }
    return Status::Stalled;
  }

 private:
  /// Rebuilds the basis inverse from scratch to shed eta-update drift, and
  /// recomputes the basic values against the current nonbasic bounds.
  void refactor() {
    pivots_since_refactor_ = 0;
    RealMatrix basis_matrix(m_, m_);
    for (int r = 0; r < m_; ++r) basis_matrix.col(r) = column(basis_[r]);
    binv_ = basis_matrix.partialPivLu().inverse();
    Eigen::VectorXd rhs = b_;
    for (int j = 0; j < n_ + m_; ++j) {
      if (basic_[j]) continue;
      const double v = at_upper_[j] ? ub_(j) : lb_(j);
      if (v != 0.0) rhs -= column(j) * v;
    }
    xb_ = binv_ * rhs;
  }

  Eigen::VectorXd column(int j) const {
    if (j < n_) return a_.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    if (j < n_ + m_) e(j - n_) = 1.0;
    else e(j - n_ - m_) = art_sign_(j - n_ - m_);
    return e;
  }

  double column_dot(const Eigen::VectorXd& y, int j) const {
    if (j < n_) return y.dot(a_.col(j));
    if (j < n_ + m_) return y(j - n_);
    return y(j - n_ - m_) * art_sign_(j - n_ - m_);
  }

  bool finish(double obj, double feas_tol, Eigen::VectorXd& x_out) {
    if (obj > feas_tol) return false;
    x_out = Eigen::VectorXd::Zero(n_);
    for (int j = 0; j < n_; ++j)
      if (!basic_[j]) x_out(j) = at_upper_[j] ? ub_(j) : lb_(j);
    for (int r = 0; r < m_; ++r)
      if (basis_[r] < n_) x_out(basis_[r]) = xb_(r);
    return true;
  }

  const RealMatrix& a_;
  const Eigen::VectorXd& b_;
  int m_, n_;
  double row_tol_;
  Eigen::VectorXd lb_, ub_, xb_, art_sign_;
  std::vector<int> basis_;
  std::vector<bool> at_upper_, basic_, blocked_;
  RealMatrix binv_;
  int pivots_since_refactor_ = 0;
};

}  // namespace

FeasibilityResult solve_stacked_lp(const IntegerSystem& sys, const SearchBudget& budget) {
  FeasibilityResult result;
  const int n = sys.var_count();
  const double row_tol = std::max(budget.tolerance, 1e-9);
  const double accept = std::max(budget.tolerance, 1e-6);

  struct Node {
    Eigen::VectorXd lower, upper;
  };
  std::vector<Node> stack;
  stack.push_back({sys.lower.cast<double>(), sys.upper.cast<double>()});

  const long long node_cap = std::max<long long>(64, budget.node_limit / 4096);
  while (!stack.empty()) {
    const Node node = std::move(stack.back());
    stack.pop_back();
    if (++result.node_count > node_cap) {
      result.status = FeasibilityStatus::BudgetExhausted;
      return result;
    }

    Phase1Simplex lp(sys.a, sys.b, row_tol);
    Eigen::VectorXd x;
    const Phase1Simplex::Status st = lp.solve(node.lower, node.upper, x);
    if (st == Phase1Simplex::Status::Infeasible) continue;
    if (st == Phase1Simplex::Status::Stalled) {
      // Numerical trouble: treat conservatively as exhausted rather than
      // declaring the subtree infeasible.
      result.status = FeasibilityStatus::BudgetExhausted;
      return result;
    }

    // The row slacks let an LP vertex sit up to row_tol away from the
    // integer point it represents, so try the rounding first and only
    // branch when the rounded point genuinely fails.
    Eigen::VectorXi xi(n);
    for (int j = 0; j < n; ++j) xi(j) = static_cast<int>(std::round(x(j)));
    if (sys.within_bounds(xi) && sys.residual(xi) <= accept) {
      result.status = FeasibilityStatus::Found;
      result.x = std::move(xi);
      return result;
    }
    int branch = -1;
    double most = 1e-6;
    for (int j = 0; j < n; ++j) {
      const double f = std::abs(x(j) - std::round(x(j)));
      if (f > most) {
        most = f;
        branch = j;
      }
    }
    if (branch < 0) continue;  // integral but not acceptable: dead end

    Node down = node, up = node;
    down.upper(branch) = std::floor(x(branch));
    up.lower(branch) = std::ceil(x(branch));
    if (x(branch) - std::floor(x(branch)) < 0.5) {
      stack.push_back(std::move(up));
      stack.push_back(std::move(down));  // explored first
    } else {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));
    }
  }
  result.status = FeasibilityStatus::Infeasible;
  return result;
}

}  // namespace bindeblur
