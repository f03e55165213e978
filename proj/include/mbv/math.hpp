#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mbv {

// Asymptotic variance weights of the diffusion and noise parts of a block
// average, together with the tuning constants they were evaluated at.
struct BiasConstants {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

// mu_r = E|Z|^r for Z standard normal, r >= 0.
// Evaluated as exp(r/2 log 2 + lgamma((r+1)/2) - log(pi)/2).
double abs_moment(double r);

// nu1 = c1 (3 c2 - 4 + ((2 - c2)^3 v 0)) / (3 (c2 - 1)^2)
// nu2 = 2 ((c2 - 1) ^ 1) / (c1 (c2 - 1)^2)
// Requires c1 > 0 and c2 > 1.
BiasConstants bias_constants(double c1, double c2);

// Finite-sample refinement of nu1:
//   nu1 + ((3 - c2) ^ 1/(c2 - 1)) / ((c2 - 1) sqrt(n)),
// dropping the O(1/n) remainder. The min-expression resolves an ambiguous
// typography; both readings coincide for c2 <= 2, and this parse is the one
// verified against exact_block_variances.
double finite_sample_nu1(long n, double c1, double c2);

// Exact variances of n^{1/4} * (block average) for a pure Brownian path and
// for pure iid noise with variance omega2, by direct double summation over
// the L-K+1 overlapping K-tick increments of one block:
//   varW = sum_{i,j=0}^{L-K} max(0, K - |i-j|) / (sqrt(n) (L-K)^2)
//   varU = sqrt(n) omega2 sum_{i,j=0}^{L-K} (2 1{i=j} - 1{|i-j|=K}) / (L-K)^2
// Brute-force oracle for the bias_constants limits; requires 1 <= K < L <= n.
std::pair<double, double> exact_block_variances(long K, long L, long n,
                                                double omega2);

// Asymptotic variance constant of a multipower statistic with the given
// powers:
//   A = prod mu_{2 r_l} - (2k - 1) prod mu_{r_l}^2
//       + 2 sum_{j=1}^{k-1} prod_{l<=j} mu_{r_l} prod_{l>k-j} mu_{r_l}
//                           prod_{l<=k-j} mu_{r_l + r_{l+j}}
double clt_constant_A(const std::vector<double>& powers);

struct OptimalConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double min_variance = 0.0;
};

// Tuning constants minimising the conditional variance of the volatility
// estimator when sigma is constant: c2 = 8/5, c1 = sqrt(12.5) omega/sigma,
// attained variance 256/(3 sqrt(18)) sigma^3 omega.
OptimalConstants optimal_constants(double omega, double sigma);

// Inverse of the standard normal CDF (Acklam's rational approximation with
// one Halley correction step; |error| < 1e-13 on (0,1)).
double normal_quantile(double p);

}  // namespace mbv
