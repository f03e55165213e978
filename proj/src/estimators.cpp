#include "mbv/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mbv/math.hpp"

namespace mbv {

namespace {

BlockScheme finish_scheme(long n, double c1, double c2, double gamma, long K) {
  if (K < 1) K = 1;
  long M = static_cast<long>(std::floor(static_cast<double>(n) / (c2 * static_cast<double>(K))));
  if (M < 1) M = 1;
  const long L = n / M;
  if (K >= L)
    throw std::runtime_error(
        "block scheme infeasible: K >= L for n=" + std::to_string(n) +
        ", c1=" + std::to_string(c1) + ", c2=" + std::to_string(c2) +
        " (K=" + std::to_string(K) + ", L=" + std::to_string(L) + ")");
  BlockScheme s;
  s.n = n;
  s.K = K;
  s.M = M;
  s.L = L;
  s.c1_eff = static_cast<double>(K) /
             std::pow(static_cast<double>(n), 0.5 + gamma);
  s.c2_eff = static_cast<double>(n) /
             (static_cast<double>(M) * static_cast<double>(K));
  s.gamma = gamma;
  if (s.c2_eff <= 1.0)
    throw std::runtime_error(
        "block scheme infeasible: effective c2 <= 1 for n=" + std::to_string(n) +
        ", c1=" + std::to_string(c1) + ", c2=" + std::to_string(c2));
  return s;
}

void check_scheme(const Observations& obs, const BlockScheme& scheme) {
  if (scheme.n != obs.n)
    throw std::invalid_argument("scheme was built for a different grid size");
  if (static_cast<long>(obs.y.size()) != obs.n + 1)
    throw std::invalid_argument("observations must hold n+1 values");
}

struct NuConstants {
  double nu1;   // plain or finite-sample, as requested
  double nu2;
  double c1c2;  // c1_eff * c2_eff
};

NuConstants nus(const BlockScheme& s, bool finite_sample) {
  if (s.gamma > 0.0)
    throw std::runtime_error(
        "bias-corrected estimators expect a standard scheme; use the gamma "
        "variants for gamma > 0");
  const BiasConstants bc = bias_constants(s.c1_eff, s.c2_eff);
  NuConstants out;
  out.nu1 = finite_sample ? finite_sample_nu1(s.n, s.c1_eff, s.c2_eff) : bc.nu1;
  out.nu2 = bc.nu2;
  out.c1c2 = s.c1_eff * s.c2_eff;
  return out;
}

double mbv_from(const std::vector<double>& bar, double r, double l, long n) {
  const long M = static_cast<long>(bar.size());
  const long stop = l == 0.0 ? M : M - 1;
  double acc = 0.0;
  if (l == 0.0) {
    for (long m = 0; m < stop; ++m) acc += std::pow(std::fabs(bar[m]), r);
  } else {
    for (long m = 0; m < stop; ++m)
      acc += std::pow(std::fabs(bar[m]), r) * std::pow(std::fabs(bar[m + 1]), l);
  }
  return std::pow(static_cast<double>(n), (r + l) / 4.0 - 0.5) * acc;
}

double mmv_from(const std::vector<double>& bar, const std::vector<double>& powers,
                long n, double rate_factor) {
  const long M = static_cast<long>(bar.size());
  const long k = static_cast<long>(powers.size());
  double rplus = 0.0;
  for (double r : powers) rplus += r;
  double acc = 0.0;
  for (long m = 0; m + k <= M; ++m) {
    double term = 1.0;
    for (long j = 0; j < k; ++j)
      term *= std::pow(std::fabs(bar[m + j]), powers[j]);
    acc += term;
  }
  return std::pow(static_cast<double>(n), rate_factor * (rplus / 4.0 - 0.5)) * acc;
}

}  // namespace

BlockScheme make_block_scheme(long n, double c1, double c2) {
  if (n < 16) throw std::invalid_argument("make_block_scheme: n must be >= 16");
  if (c1 <= 0.0) throw std::invalid_argument("make_block_scheme: c1 must be > 0");
  if (c2 <= 1.0) throw std::invalid_argument("make_block_scheme: c2 must be > 1");
  const long K = static_cast<long>(
      std::lround(c1 * std::sqrt(static_cast<double>(n))));
  return finish_scheme(n, c1, c2, 0.0, K);
}

BlockScheme make_gamma_scheme(long n, double c1, double c2, double gamma) {
  if (n < 16) throw std::invalid_argument("make_gamma_scheme: n must be >= 16");
  if (c1 <= 0.0) throw std::invalid_argument("make_gamma_scheme: c1 must be > 0");
  if (c2 <= 1.0) throw std::invalid_argument("make_gamma_scheme: c2 must be > 1");
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("make_gamma_scheme: gamma must lie in (0, 1/2)");
  const long K = static_cast<long>(
      std::lround(c1 * std::pow(static_cast<double>(n), 0.5 + gamma)));
  return finish_scheme(n, c1, c2, gamma, K);
}

std::vector<double> block_averages(const Observations& obs,
                                   const BlockScheme& scheme) {
  check_scheme(obs, scheme);
  // Work on one-tick increments: level shifts and constant series then cancel
  // exactly. cum[i] holds y_i - y_0; cum2 is its running sum, so the block sum
  // of K-tick increments collapses to four lookups. The scratch buffers are
  // per-thread caches, not state.
  thread_local std::vector<double> cum, cum2;
  cum.resize(obs.n + 1);
  cum[0] = 0.0;
  for (long i = 1; i <= obs.n; ++i) cum[i] = cum[i - 1] + (obs.y[i] - obs.y[i - 1]);
  cum2.resize(obs.n + 2);
  cum2[0] = 0.0;
  for (long i = 0; i <= obs.n; ++i) cum2[i + 1] = cum2[i] + cum[i];

  const long K = scheme.K, L = scheme.L;
  std::vector<double> bar(scheme.M);
  const double norm = 1.0 / static_cast<double>(L - K);
  for (long m = 1; m <= scheme.M; ++m) {
    const long a = (m - 1) * L;
    const long b = m * L - K;  // inclusive upper limit of the increment start
    const double hi = cum2[b + K + 1] - cum2[a + K];
    const double lo = cum2[b + 1] - cum2[a];
    bar[m - 1] = (hi - lo) * norm;
  }
  return bar;
}

double block_average(const Observations& obs, const BlockScheme& scheme, long m) {
  if (m < 1 || m > scheme.M)
    throw std::out_of_range("block_average: block index out of range");
  return block_averages(obs, scheme)[m - 1];
}

double mbv(const Observations& obs, double r, double l, const BlockScheme& scheme) {
  if (r < 0.0 || l < 0.0) throw std::invalid_argument("mbv: powers must be >= 0");
  return mbv_from(block_averages(obs, scheme), r, l, scheme.n);
}

double mmv(const Observations& obs, const std::vector<double>& powers,
           const BlockScheme& scheme) {
  if (powers.empty()) throw std::invalid_argument("mmv: powers must be nonempty");
  for (double r : powers)
    if (r < 0.0) throw std::invalid_argument("mmv: powers must be >= 0");
  if (static_cast<long>(powers.size()) > scheme.M)
    throw std::runtime_error("mmv: more powers than blocks");
  return mmv_from(block_averages(obs, scheme), powers, scheme.n, 1.0);
}

double mmv_gamma(const Observations& obs, const std::vector<double>& powers,
                 const BlockScheme& scheme) {
  if (scheme.gamma <= 0.0)
    throw std::runtime_error("mmv_gamma: scheme has gamma == 0; use mmv");
  if (powers.empty())
    throw std::invalid_argument("mmv_gamma: powers must be nonempty");
  if (static_cast<long>(powers.size()) > scheme.M)
    throw std::runtime_error("mmv_gamma: more powers than blocks");
  return mmv_from(block_averages(obs, scheme), powers, scheme.n,
                  1.0 - 2.0 * scheme.gamma);
}

double omega_hat(const Observations& obs) {
  if (obs.n < 1) throw std::invalid_argument("omega_hat: n must be >= 1");
  double acc = 0.0;
  for (long i = 1; i <= obs.n; ++i) {
    const double d = obs.y[i] - obs.y[i - 1];
    acc += d * d;
  }
  return acc / (2.0 * static_cast<double>(obs.n));
}

Estimate mrv(const Observations& obs, const BlockScheme& scheme,
             bool use_finite_sample_nu1) {
  const auto bar = block_averages(obs, scheme);
  const auto nu = nus(scheme, use_finite_sample_nu1);
  const double om = omega_hat(obs);
  Estimate est;
  est.scheme = scheme;
  est.omega2_hat = om;
  est.value = (nu.c1c2 * mbv_from(bar, 2.0, 0.0, scheme.n) - nu.nu2 * om) / nu.nu1;
  est.feasible_variance = 2.0 * nu.c1c2 * nu.c1c2 / (3.0 * nu.nu1 * nu.nu1) *
                          mbv_from(bar, 4.0, 0.0, scheme.n);
  return est;
}

Estimate mrq(const Observations& obs, const BlockScheme& scheme,
             bool use_finite_sample_nu1) {
  const auto bar = block_averages(obs, scheme);
  const auto nu = nus(scheme, use_finite_sample_nu1);
  const double om = omega_hat(obs);
  const double mrv_value =
      (nu.c1c2 * mbv_from(bar, 2.0, 0.0, scheme.n) - nu.nu2 * om) / nu.nu1;
  Estimate est;
  est.scheme = scheme;
  est.omega2_hat = om;
  est.value = (nu.c1c2 / 3.0 * mbv_from(bar, 4.0, 0.0, scheme.n) -
               2.0 * nu.nu1 * nu.nu2 * om * mrv_value - nu.nu2 * nu.nu2 * om * om) /
              (nu.nu1 * nu.nu1);
  return est;
}

Estimate mbv_robust(const Observations& obs, const BlockScheme& scheme,
                    bool use_finite_sample_nu1) {
  const auto bar = block_averages(obs, scheme);
  const auto nu = nus(scheme, use_finite_sample_nu1);
  const double om = omega_hat(obs);
  const double mu1 = abs_moment(1.0);
  Estimate est;
  est.scheme = scheme;
  est.omega2_hat = om;
  est.value = (nu.c1c2 / (mu1 * mu1) * mbv_from(bar, 1.0, 1.0, scheme.n) -
               nu.nu2 * om) /
              nu.nu1;
  return est;
}

Estimate mtq(const Observations& obs, const BlockScheme& scheme,
             bool use_finite_sample_nu1) {
  const auto bar = block_averages(obs, scheme);
  const auto nu = nus(scheme, use_finite_sample_nu1);
  const double om = omega_hat(obs);
  const double mu1 = abs_moment(1.0);
  const double mu43 = abs_moment(4.0 / 3.0);
  const double robust_value =
      (nu.c1c2 / (mu1 * mu1) * mbv_from(bar, 1.0, 1.0, scheme.n) - nu.nu2 * om) /
      nu.nu1;
  const double tripower =
      mmv_from(bar, {4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0}, scheme.n, 1.0);
  Estimate est;
  est.scheme = scheme;
  est.omega2_hat = om;
  est.value = (nu.c1c2 / (mu43 * mu43 * mu43) * tripower -
               2.0 * nu.nu1 * nu.nu2 * om * robust_value -
               nu.nu2 * nu.nu2 * om * om) /
              (nu.nu1 * nu.nu1);
  return est;
}

double feasible_variance(const Observations& obs, const BlockScheme& scheme,
                         bool use_finite_sample_nu1) {
  const auto nu = nus(scheme, use_finite_sample_nu1);
  return 2.0 * nu.c1c2 * nu.c1c2 / (3.0 * nu.nu1 * nu.nu1) *
         mbv(obs, 4.0, 0.0, scheme);
}

Estimate mrv_gamma(const Observations& obs, const BlockScheme& scheme) {
  if (scheme.gamma <= 0.0)
    throw std::runtime_error("mrv_gamma: scheme has gamma == 0; use mrv");
  const auto bar = block_averages(obs, scheme);
  const auto [varW, varU] = exact_block_variances(scheme.K, scheme.L, scheme.n, 1.0);
  const double om = omega_hat(obs);
  const double sq = std::sqrt(static_cast<double>(scheme.n));
  const double mean_sq =
      mmv_from(bar, {2.0}, scheme.n, 1.0 - 2.0 * scheme.gamma) * sq /
      static_cast<double>(scheme.M);
  Estimate est;
  est.scheme = scheme;
  est.omega2_hat = om;
  est.value = (mean_sq - varU * om) / varW;
  return est;
}

Estimate mbv_robust_gamma(const Observations& obs, const BlockScheme& scheme) {
  if (scheme.gamma <= 0.0)
    throw std::runtime_error("mbv_robust_gamma: scheme has gamma == 0");
  if (scheme.M < 2)
    throw std::runtime_error("mbv_robust_gamma: needs at least two blocks");
  const auto bar = block_averages(obs, scheme);
  const auto [varW, varU] = exact_block_variances(scheme.K, scheme.L, scheme.n, 1.0);
  const double om = omega_hat(obs);
  const double mu1 = abs_moment(1.0);
  const double sq = std::sqrt(static_cast<double>(scheme.n));
  const double mean_pair =
      mmv_from(bar, {1.0, 1.0}, scheme.n, 1.0 - 2.0 * scheme.gamma) * sq /
      (static_cast<double>(scheme.M - 1) * mu1 * mu1);
  Estimate est;
  est.scheme = scheme;
  est.omega2_hat = om;
  est.value = (mean_pair - varU * om) / varW;
  return est;
}

std::optional<double> standardized_iv_stat(const Observations& obs,
                                           const BlockScheme& scheme,
                                           double iv_ref, bool log_form,
                                           bool use_finite_sample_nu1) {
  const Estimate est = mrv(obs, scheme, use_finite_sample_nu1);
  const double beta_n = std::sqrt(*est.feasible_variance);
  if (beta_n <= 0.0) return std::nullopt;
  const double root4 = std::pow(static_cast<double>(scheme.n), 0.25);
  if (log_form) {
    if (est.value <= 0.0) return std::nullopt;
    return root4 * (std::log(est.value) - std::log(iv_ref)) / (beta_n / est.value);
  }
  return root4 * (est.value - iv_ref) / beta_n;
}

std::pair<double, double> confidence_interval(const Estimate& est, double level) {
  if (!est.feasible_variance)
    throw std::runtime_error("confidence_interval: estimate carries no variance");
  if (level < 0.0 || level >= 1.0)
    throw std::invalid_argument("confidence_interval: level must lie in [0, 1)");
  const double z = level == 0.0 ? 0.0 : normal_quantile(0.5 * (1.0 + level));
  const double hw = z * std::sqrt(*est.feasible_variance) /
                    std::pow(static_cast<double>(est.scheme.n), 0.25);
  return {est.value - hw, est.value + hw};
}

}  // namespace mbv
