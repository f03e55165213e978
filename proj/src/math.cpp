#include "mbv/math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mbv {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double abs_moment(double r) {
  if (r < 0.0) throw std::invalid_argument("abs_moment: r must be >= 0");
  return std::exp(0.5 * r * std::log(2.0) + std::lgamma(0.5 * (r + 1.0)) -
                  0.5 * std::log(kPi));
}

BiasConstants bias_constants(double c1, double c2) {
  if (c1 <= 0.0) throw std::invalid_argument("bias_constants: c1 must be > 0");
  if (c2 <= 1.0)
    throw std::invalid_argument(
        "bias_constants: c2 must be > 1 (block shorter than averaging window)");
  const double a = c2 - 1.0;
  const double cube = (2.0 - c2) * (2.0 - c2) * (2.0 - c2);
  BiasConstants out;
  out.c1 = c1;
  out.c2 = c2;
  out.nu1 = c1 * (3.0 * c2 - 4.0 + std::max(0.0, cube)) / (3.0 * a * a);
  out.nu2 = 2.0 * std::min(a, 1.0) / (c1 * a * a);
  return out;
}

double finite_sample_nu1(long n, double c1, double c2) {
  if (n < 4) throw std::invalid_argument("finite_sample_nu1: n must be >= 4");
  const BiasConstants bc = bias_constants(c1, c2);
  const double a = c2 - 1.0;
  return bc.nu1 + std::min(3.0 - c2, 1.0 / a) / (a * std::sqrt(static_cast<double>(n)));
}

std::pair<double, double> exact_block_variances(long K, long L, long n,
                                                double omega2) {
  if (K < 1 || K >= L || L > n)
    throw std::invalid_argument("exact_block_variances: need 1 <= K < L <= n");
  if (omega2 < 0.0)
    throw std::invalid_argument("exact_block_variances: omega2 must be >= 0");
  const long S = L - K;  // normaliser; the block holds S+1 overlapping increments
  double sumW = 0.0;
  double sumU = 0.0;
  for (long i = 0; i <= S; ++i) {
    for (long j = 0; j <= S; ++j) {
      const long d = std::labs(i - j);
      sumW += static_cast<double>(std::max(0l, K - d));
      sumU += (i == j ? 2.0 : 0.0) - (d == K ? 1.0 : 0.0);
    }
  }
  const double sq = std::sqrt(static_cast<double>(n));
  const double denom = static_cast<double>(S) * static_cast<double>(S);
  return {sumW / (sq * denom), sq * omega2 * sumU / denom};
}

double clt_constant_A(const std::vector<double>& powers) {
  if (powers.empty())
    throw std::invalid_argument("clt_constant_A: powers must be nonempty");
  for (double r : powers)
    if (r < 0.0) throw std::invalid_argument("clt_constant_A: powers must be >= 0");
  const std::size_t k = powers.size();

  double prod2 = 1.0;
  double prodSq = 1.0;
  for (double r : powers) {
    prod2 *= abs_moment(2.0 * r);
    const double m = abs_moment(r);
    prodSq *= m * m;
  }
  double acc = prod2 - (2.0 * static_cast<double>(k) - 1.0) * prodSq;
  for (std::size_t j = 1; j + 1 <= k; ++j) {
    double term = 1.0;
    for (std::size_t l = 1; l <= j; ++l) term *= abs_moment(powers[l - 1]);
    for (std::size_t l = k - j + 1; l <= k; ++l) term *= abs_moment(powers[l - 1]);
    for (std::size_t l = 1; l <= k - j; ++l)
      term *= abs_moment(powers[l - 1] + powers[l + j - 1]);
    acc += 2.0 * term;
  }
  return acc;
}

OptimalConstants optimal_constants(double omega, double sigma) {
  if (omega <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("optimal_constants: omega and sigma must be > 0");
  OptimalConstants out;
  out.c2 = 8.0 / 5.0;
  out.c1 = std::sqrt(18.0 / ((out.c2 - 1.0) * (4.0 - out.c2))) * omega / sigma;
  out.min_variance = 256.0 / (3.0 * std::sqrt(18.0)) * sigma * sigma * sigma * omega;
  return out;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie in (0,1)");

  // Acklam's coefficients.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};

  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against erfc for full double accuracy.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace mbv
