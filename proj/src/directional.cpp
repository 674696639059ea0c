#include "bindeblur/directional.hpp"

#include <chrono>
#include <cmath>

namespace bindeblur {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Appends the real/imaginary rows of one coefficient over the line-sum
/// unknowns: X~ = sum_j eta_j e^{2 pi i u j / n}.
void append_coefficient_rows(RealMatrix& a, Eigen::VectorXd& b, int& next_row, int n,
                             int multiplier, Complex value) {
  for (int j = 1; j <= n; ++j) {
    const double angle = 2.0 * M_PI * static_cast<double>(multiplier) * j / n;
    a(next_row, j - 1) = std::cos(angle);
    a(next_row + 1, j - 1) = std::sin(angle);
  }
  b(next_row) = value.real();
  b(next_row + 1) = value.imag();
  next_row += 2;
}

DirectionalData skipped(const DirectionClass& dir, double elapsed) {
  DirectionalData data;
  data.direction = dir;
  data.kind = DirectionalKind::SkippedRawCoefficients;
  data.elapsed = elapsed;
  return data;
}

}  // namespace

DirectionalData recover_direction_sums(const BandedSpectrum& spec, const DirectionClass& dir,
                                       const SolverConfig& cfg) {
  const auto start = Clock::now();
  const int n = spec.n1();
  const int t = dir.line_count;

  IntegerSystem sys;
  sys.a = RealMatrix::Zero(2 * dir.m_count + 1, t);
  sys.b = Eigen::VectorXd::Zero(sys.a.rows());
  int row = 0;
  for (const auto& member : dir.members) {
    const int u = direction_multiplier(n, {dir.k, dir.l}, member);
    append_coefficient_rows(sys.a, sys.b, row, t, u, spec.value(member.first, member.second));
  }
  sys.a.row(row).setOnes();
  sys.b(row) = spec.popcount();
  sys.lower = Eigen::VectorXi::Zero(t);
  sys.upper = Eigen::VectorXi::Constant(t, dir.line_capacity);

  const LatticeSolveResult solved = solve_integer_system(sys, cfg);
  if (solved.status != LatticeSolveStatus::Found || !sys.within_bounds(solved.x))
    return skipped(dir, seconds_since(start));

  DirectionalData data;
  data.direction = dir;
  data.kind = DirectionalKind::ExactSums;
  data.sums = solved.x;
  data.residual = solved.residual;
  data.elapsed = seconds_since(start);
  return data;
}

DirectionalData recover_coarse_then_fine(const BandedSpectrum& spec, int p, IndexPair axis,
                                         const SolverConfig& cfg) {
  const auto start = Clock::now();
  const int n = p * p;
  const int s = spec.popcount();

  // Members of the axis class present in the band: unit multiples u * axis.
  std::vector<IndexPair> members;
  std::vector<int> multipliers;
  for (const auto& rep : spec.band().free_representatives()) {
    const auto [k, l] = rep;
    if (k == 0 && l == 0) continue;
    if (mod_positive(k, p) == 0 && mod_positive(l, p) == 0) continue;
    if (!slope_equivalent(n, axis, rep)) continue;
    members.push_back(rep);
    multipliers.push_back(direction_multiplier(n, axis, rep));
  }
  const IndexPair coarse_index{p * axis.first, p * axis.second};
  if (members.empty() || !spec.has(coarse_index.first, coarse_index.second))
    throw UnstableCoarseSolve("recover_coarse_then_fine: required coefficients missing");

  // Stage 1: the p coarse sums over lines modulo p, from the k = p
  // coefficient plus the popcount.
  IntegerSystem coarse;
  coarse.a = RealMatrix::Zero(3, p);
  coarse.b = Eigen::VectorXd::Zero(3);
  int row = 0;
  append_coefficient_rows(coarse.a, coarse.b, row, p, 1,
                          spec.value(coarse_index.first, coarse_index.second));
  coarse.a.row(row).setOnes();
  coarse.b(row) = s;
  coarse.lower = Eigen::VectorXi::Zero(p);
  coarse.upper = Eigen::VectorXi::Constant(p, p * p * p);

  const LatticeSolveResult coarse_solved = solve_integer_system(coarse, cfg);
  if (coarse_solved.status != LatticeSolveStatus::Found ||
      !coarse.within_bounds(coarse_solved.x))
    throw UnstableCoarseSolve("recover_coarse_then_fine: coarse solve rejected");

  // Stage 2: the p^2 fine sums from the unit-multiple coefficients plus the
  // coarse equalities.
  IntegerSystem fine;
  fine.a = RealMatrix::Zero(2 * static_cast<int>(members.size()) + p, n);
  fine.b = Eigen::VectorXd::Zero(fine.a.rows());
  row = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    append_coefficient_rows(fine.a, fine.b, row, n, multipliers[i],
                            spec.value(members[i].first, members[i].second));
  for (int group = 1; group <= p; ++group) {
    for (int j = group; j <= n; j += p) fine.a(row, j - 1) = 1.0;
    fine.b(row) = coarse_solved.x(group - 1);
    ++row;
  }
  fine.lower = Eigen::VectorXi::Zero(n);
  fine.upper = Eigen::VectorXi::Constant(n, n);

  const LatticeSolveResult fine_solved = solve_integer_system(fine, cfg);
  if (fine_solved.status != LatticeSolveStatus::Found || !fine.within_bounds(fine_solved.x))
    throw UnstableCoarseSolve("recover_coarse_then_fine: fine solve rejected");

  DirectionalData data;
  data.direction.k = axis.first;
  data.direction.l = axis.second;
  data.direction.members = members;
  data.direction.m_count = static_cast<int>(members.size());
  data.direction.line_count = n;
  data.direction.line_capacity = n;
  data.kind = DirectionalKind::ExactSums;
  data.sums = fine_solved.x;
  data.residual = std::max(coarse_solved.residual, fine_solved.residual);
  data.elapsed = seconds_since(start);
  return data;
}

DirectionalData extract_constraint_block(const BandedSpectrum& spec, int p,
                                         const DirectionClass& dir, const SolverConfig& cfg) {
  const auto start = Clock::now();
  const int n = p * p;

  IntegerSystem sys;
  sys.a = RealMatrix::Zero(2 * dir.m_count, n);
  sys.b = Eigen::VectorXd::Zero(sys.a.rows());
  int row = 0;
  for (const auto& member : dir.members) {
    const int u = direction_multiplier(n, {dir.k, dir.l}, member);
    append_coefficient_rows(sys.a, sys.b, row, n, u, spec.value(member.first, member.second));
  }
  // Bounds are not meaningful here: the short vector is only trusted up to a
  // constant per coarse class, so its absolute values may fall outside the
  // admissible line-sum range.
  sys.lower = Eigen::VectorXi::Constant(n, -n * n);
  sys.upper = Eigen::VectorXi::Constant(n, n * n);

  const LatticeSolveResult solved = solve_integer_system(sys, cfg);
  if (solved.status != LatticeSolveStatus::Found) return skipped(dir, seconds_since(start));

  // Pairwise offsets inside each coarse class (fine labels congruent mod p),
  // anchored at the smallest label, then the popcount row.
  DirectionalData data;
  data.direction = dir;
  data.kind = DirectionalKind::ConstraintBlock;
  const int row_count = p * (p - 1) + 1;
  data.constraint_rows = RealMatrix::Zero(row_count, n);
  data.constraint_rhs = Eigen::VectorXd::Zero(row_count);
  row = 0;
  for (int group = 1; group <= p; ++group) {
    for (int j = group + p; j <= n; j += p) {
      data.constraint_rows(row, group - 1) = 1.0;
      data.constraint_rows(row, j - 1) = -1.0;
      data.constraint_rhs(row) = solved.x(group - 1) - solved.x(j - 1);
      ++row;
    }
  }
  data.constraint_rows.row(row).setOnes();
  data.constraint_rhs(row) = spec.popcount();
  data.residual = solved.residual;
  data.elapsed = seconds_since(start);
  return data;
}

}  // namespace bindeblur
