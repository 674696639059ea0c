#include "bindeblur/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace bindeblur {

namespace {

BigInt binomial(long long n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = static_cast<int>(n - k);
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

/// log10 of a positive big integer, accurate enough for display arithmetic.
double log10_big(const BigInt& v) {
  if (v <= 0) throw std::domain_error("log10_big: nonpositive argument");
  const unsigned bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 53) return std::log10(v.convert_to<double>());
  const unsigned shift = bits - 53;
  const double mantissa = BigInt(v >> shift).convert_to<double>();
  return std::log10(mantissa) + shift * std::log10(2.0);
}

}  // namespace

BigInt count_bounded_compositions(long long s, int boxes, int cap) {
  if (boxes < 0 || cap < 0) return 0;
  if (boxes == 0) return s == 0 ? 1 : 0;
  if (s < 0 || s > static_cast<long long>(boxes) * cap) return 0;
  BigInt total = 0;
  const long long step = static_cast<long long>(cap) + 1;
  for (int n = 0; n <= boxes; ++n) {
    const long long rem = s - n * step;
    if (rem < 0) break;
    const BigInt term = binomial(boxes, n) * binomial(rem + boxes - 1, boxes - 1);
    if (n % 2 == 0)
      total += term;
    else
      total -= term;
  }
  return total;
}

BigInt count_matrices_given_sums(const Eigen::VectorXi& column_sums, int rows) {
  BigInt total = 1;
  for (int i = 0; i < column_sums.size(); ++i) {
    total *= binomial(rows, column_sums(i));
    if (total == 0) return 0;
  }
  return total;
}

BigInt nu(int p, int k_bound) {
  // Shift each entry by k_bound: vectors in [0, 2K]^p summing to pK.
  return count_bounded_compositions(static_cast<long long>(p) * k_bound, p, 2 * k_bound);
}

double digits_estimate(int p, int k_bound, int m) {
  if (p <= 0 || k_bound < 0 || m <= 0)
    throw std::invalid_argument("digits_estimate: arguments must be positive");
  const BigInt count = nu(p, k_bound);
  return std::log10(2.0) - 0.5 * std::log10(static_cast<double>(p) * (2 * k_bound + 1)) +
         log10_big(count) / (2.0 * m);
}

int digits_estimate_rounded(int p, int k_bound, int m) {
  return static_cast<int>(std::floor(digits_estimate(p, k_bound, m) + 0.5));
}

StabilityEstimate stability_estimate(int p, int k_bound, int m) {
  StabilityEstimate est;
  est.p = p;
  est.k_bound = k_bound;
  est.m = m;
  est.nu_value = nu(p, k_bound);
  est.digits = digits_estimate(p, k_bound, m);
  return est;
}

}  // namespace bindeblur
