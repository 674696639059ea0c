#include "bindeblur/line_geometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

namespace bindeblur {

namespace {

/// Ordering key for canonical representatives: smallest max-order first,
/// then |k|, |l|, then nonnegative k preferred, then (k, l).
std::tuple<int, int, int, int, int, int> canonical_key(IndexPair d) {
  const auto [k, l] = d;
  return {std::max(std::abs(k), std::abs(l)), std::abs(k), std::abs(l), k < 0 ? 1 : 0, k, l};
}

IndexPair pick_canonical(const std::vector<IndexPair>& members) {
  IndexPair best = members.front();
  auto best_key = canonical_key(best);
  for (const auto& m : members) {
    for (const IndexPair& cand : {m, IndexPair{-m.first, -m.second}}) {
      auto key = canonical_key(cand);
      if (key < best_key) {
        best = cand;
        best_key = key;
      }
    }
  }
  return best;
}

void finalize_classes(std::vector<DirectionClass>& classes) {
  for (auto& c : classes) {
    std::sort(c.members.begin(), c.members.end());
    c.m_count = static_cast<int>(c.members.size());
  }
  std::stable_sort(classes.begin(), classes.end(),
                   [](const DirectionClass& a, const DirectionClass& b) {
                     if (a.m_count != b.m_count) return a.m_count > b.m_count;
                     return canonical_key({a.k, a.l}) < canonical_key({b.k, b.l});
                   });
}

}  // namespace

int mod_positive(long long v, int n) {
  long long r = v % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

int mod_inverse(int a, int n) {
  // Extended Euclid.
  int r0 = n, r1 = mod_positive(a, n);
  int t0 = 0, t1 = 1;
  while (r1 != 0) {
    const int q = r0 / r1;
    const int r2 = r0 - q * r1;
    const int t2 = t0 - q * t1;
    r0 = r1;
    r1 = r2;
    t0 = t1;
    t1 = t2;
  }
  if (r0 != 1) throw std::invalid_argument("mod_inverse: not invertible");
  return mod_positive(t0, n);
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; static_cast<long long>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::pair<int, int> prime_power_decompose(int n) {
  if (n < 2) return {0, 0};
  int p = 0;
  for (int d = 2; static_cast<long long>(d) * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return {n, 1};
  int alpha = 0;
  int m = n;
  while (m % p == 0) {
    m /= p;
    ++alpha;
  }
  return m == 1 ? std::pair<int, int>{p, alpha} : std::pair<int, int>{0, 0};
}

std::vector<IndexPair> LinePartition::cells_with_label(int j) const {
  std::vector<IndexPair> cells;
  for (int m = 1; m <= n; ++m)
    for (int c = 1; c <= n; ++c)
      if (label(m, c) == j) cells.emplace_back(m, c);
  return cells;
}

LinePartition line_partition(int n, int k, int l) {
  if (mod_positive(k, n) == 0 && mod_positive(l, n) == 0)
    throw ZeroDirection("line_partition: zero direction");
  return LinePartition{n, k, l};
}

bool slope_equivalent(int n, IndexPair a, IndexPair b) {
  const long long lhs = static_cast<long long>(a.first) * b.second;
  const long long rhs = static_cast<long long>(b.first) * a.second;
  return mod_positive(lhs - rhs, n) == 0;
}

std::vector<DirectionClass> canonical_directions(int n, const Band& band) {
  // Projective normalization over Z_n (n prime): key (1, l k^-1) when
  // k != 0 mod n, else (0, 1).
  std::map<IndexPair, std::vector<IndexPair>> groups;
  for (const auto& rep : band.free_representatives()) {
    const auto [k, l] = rep;
    if (k == 0 && l == 0) continue;
    IndexPair key;
    if (mod_positive(k, n) != 0)
      key = {1, mod_positive(static_cast<long long>(mod_inverse(k, n)) * l, n)};
    else
      key = {0, 1};
    groups[key].push_back(rep);
  }
  std::vector<DirectionClass> classes;
  for (auto& [key, members] : groups) {
    DirectionClass c;
    const IndexPair canonical = pick_canonical(members);
    c.k = canonical.first;
    c.l = canonical.second;
    c.members = std::move(members);
    c.line_count = n;
    c.line_capacity = n;
    classes.push_back(std::move(c));
  }
  finalize_classes(classes);
  return classes;
}

std::vector<DirectionClass> prime_power_directions(int p, int alpha, const Band& band) {
  int n = 1;
  for (int i = 0; i < alpha; ++i) n *= p;
  // Primitive directions up to unit multiples: key (1, t) when k is a unit,
  // else (s, 1) with s = k l^-1 (s divisible by p).
  std::map<IndexPair, std::vector<IndexPair>> groups;
  for (const auto& rep : band.free_representatives()) {
    const auto [k, l] = rep;
    if (k == 0 && l == 0) continue;
    if (mod_positive(k, p) == 0 && mod_positive(l, p) == 0) continue;  // coarse coefficient
    IndexPair key;
    if (mod_positive(k, p) != 0)
      key = {1, mod_positive(static_cast<long long>(mod_inverse(k, n)) * l, n)};
    else
      key = {mod_positive(static_cast<long long>(mod_inverse(l, n)) * k, n), 1};
    groups[key].push_back(rep);
  }
  std::vector<DirectionClass> classes;
  for (auto& [key, members] : groups) {
    DirectionClass c;
    const IndexPair canonical = pick_canonical(members);
    c.k = canonical.first;
    c.l = canonical.second;
    c.members = std::move(members);
    c.line_count = n;
    c.line_capacity = n;
    classes.push_back(std::move(c));
  }
  finalize_classes(classes);
  return classes;
}

PrimePowerPartition prime_power_partition(int p, int alpha, int k, int l) {
  int n = 1;
  for (int i = 0; i < alpha; ++i) n *= p;
  if (mod_positive(k, n) == 0 && mod_positive(l, n) == 0)
    throw ZeroDirection("prime_power_partition: zero direction");
  PrimePowerPartition out;
  out.fine = LinePartition{n, k, l};
  out.coarse_modulus = n / p;
  return out;
}

int direction_multiplier(int n, IndexPair canonical, IndexPair member) {
  const auto [k, l] = canonical;
  int u;
  if (std::gcd(mod_positive(k, n), n) == 1)
    u = mod_positive(static_cast<long long>(mod_inverse(k, n)) * member.first, n);
  else if (std::gcd(mod_positive(l, n), n) == 1)
    u = mod_positive(static_cast<long long>(mod_inverse(l, n)) * member.second, n);
  else
    throw std::invalid_argument("direction_multiplier: canonical direction not invertible");
  if (mod_positive(static_cast<long long>(u) * k - member.first, n) != 0 ||
      mod_positive(static_cast<long long>(u) * l - member.second, n) != 0)
    throw std::invalid_argument("direction_multiplier: member not a multiple of canonical");
  return u;
}

}  // namespace bindeblur
