#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mbv/simulate.hpp"

namespace mbv {

// Block geometry on a grid of n ticks: K-tick increments averaged within M
// blocks of L = floor(n/M) ticks each. c1_eff and c2_eff are recomputed from
// the rounded K and M and replace the requested constants in every downstream
// formula. gamma > 0 marks the slower-rate scheme with K ~ c1 n^{1/2+gamma}.
struct BlockScheme {
  long n = 0;
  long K = 0;
  long M = 0;
  long L = 0;
  double c1_eff = 0.0;
  double c2_eff = 0.0;
  double gamma = 0.0;
};

// K = max(1, round(c1 sqrt(n))), M = max(1, floor(n / (c2 K))), L = floor(n/M).
// Throws if the resulting geometry violates K < L or c2_eff > 1.
BlockScheme make_block_scheme(long n, double c1, double c2);

// Same with K = max(1, round(c1 n^{1/2+gamma})), gamma in (0, 1/2).
BlockScheme make_gamma_scheme(long n, double c1, double c2, double gamma);

// All M block averages: the mean of the L-K+1 overlapping K-tick increments
// of each block, normalised by L-K. One O(n) prefix-sum pass.
std::vector<double> block_averages(const Observations& obs,
                                   const BlockScheme& scheme);

// Single block average, m in 1..M.
double block_average(const Observations& obs, const BlockScheme& scheme, long m);

// n^{(r+l)/4 - 1/2} sum_m |bar_m|^r |bar_{m+1}|^l, summed over m = 1..M when
// l == 0 and m = 1..M-1 otherwise.
double mbv(const Observations& obs, double r, double l, const BlockScheme& scheme);

// n^{r+/4 - 1/2} sum_{m=1}^{M-k+1} prod_j |bar_{m+j-1}|^{r_j}.
double mmv(const Observations& obs, const std::vector<double>& powers,
           const BlockScheme& scheme);

// Multipower sum under the gamma scheme, normalised by
// n^{(1-2 gamma)(r+/4 - 1/2)}; the noise contribution vanishes in its limit.
double mmv_gamma(const Observations& obs, const std::vector<double>& powers,
                 const BlockScheme& scheme);

// (1/2n) sum of squared one-tick increments; consistent for the noise
// variance omega^2 and robust to jumps.
double omega_hat(const Observations& obs);

struct Estimate {
  double value = 0.0;
  std::optional<double> feasible_variance;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  BlockScheme scheme;
  double omega2_hat = 0.0;
};

// Bias-corrected estimator of integrated volatility. The finite-sample nu1
// refinement is applied by default; pass false for the asymptotic constant.
// feasible_variance is filled with beta_n^2.
Estimate mrv(const Observations& obs, const BlockScheme& scheme,
             bool use_finite_sample_nu1 = true);

// Bias-corrected estimator of integrated quarticity.
Estimate mrq(const Observations& obs, const BlockScheme& scheme,
             bool use_finite_sample_nu1 = true);

// Jump-robust bipower estimator of integrated volatility.
Estimate mbv_robust(const Observations& obs, const BlockScheme& scheme,
                    bool use_finite_sample_nu1 = true);

// Jump-robust tripower estimator of integrated quarticity.
Estimate mtq(const Observations& obs, const BlockScheme& scheme,
             bool use_finite_sample_nu1 = true);

// beta_n^2 = (2 c1^2 c2^2 / (3 nu1^2)) MBV(Y,4,0); nonnegative by construction.
double feasible_variance(const Observations& obs, const BlockScheme& scheme,
                         bool use_finite_sample_nu1 = true);

// Integrated volatility from a gamma scheme. The slower rate makes the
// diffusion part dominate; the remaining noise share and the block variance
// are inverted exactly (via exact_block_variances), so no asymptotic
// constants enter. No feasible variance is attached.
Estimate mrv_gamma(const Observations& obs, const BlockScheme& scheme);

// Jump-robust bipower variant of mrv_gamma.
Estimate mbv_robust_gamma(const Observations& obs, const BlockScheme& scheme);

// n^{1/4} (MRV - iv_ref) / beta_n, or the delta-method log form
// n^{1/4} (log MRV - log iv_ref) / (beta_n / MRV). Empty when beta_n = 0 or,
// in the log form, when MRV <= 0.
std::optional<double> standardized_iv_stat(const Observations& obs,
                                           const BlockScheme& scheme,
                                           double iv_ref, bool log_form,
                                           bool use_finite_sample_nu1 = true);

// Central interval value -/+ z_{(1+level)/2} beta_n / n^{1/4}; level 0 gives
// the degenerate interval. Throws if the estimate carries no variance.
std::pair<double, double> confidence_interval(const Estimate& est, double level);

}  // namespace mbv
