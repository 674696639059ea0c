#ifndef BINDEBLUR_STABILITY_HPP
#define BINDEBLUR_STABILITY_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Core>

namespace bindeblur {

using BigInt = boost::multiprecision::cpp_int;

/// Exact count of nonnegative integer vectors of the given length with
/// entries <= cap summing to s (inclusion-exclusion). Out-of-range s gives 0.
BigInt count_bounded_compositions(long long s, int boxes, int cap);

/// Product of binomials choose(rows, c_n): the number of binary matrices
/// with the given column sums.
BigInt count_matrices_given_sums(const Eigen::VectorXi& column_sums, int rows);

/// Number of integer vectors e in [-K, K]^p with sum 0.
BigInt nu(int p, int k_bound);

/// Digits-of-precision heuristic for distinguishing cyclotomic integers
/// with p terms, coefficients bounded by K, observed through m coefficients:
///   log10(2) - log10(sqrt(p(2K+1))) + log10(nu(p, K)) / (2m)
double digits_estimate(int p, int k_bound, int m);

/// digits_estimate rounded half-up to an integer for display.
int digits_estimate_rounded(int p, int k_bound, int m);

struct StabilityEstimate {
  int p = 0;
  int k_bound = 0;
  int m = 0;
  BigInt nu_value;
  double digits = 0.0;
};

StabilityEstimate stability_estimate(int p, int k_bound, int m);

}  // namespace bindeblur

#endif
