#pragma once

// Test-only reference evaluations of the block statistics, written as literal
// double loops with no shared precomputation. These must stay independent of
// the prefix-sum implementation they are used to check.

#include <cmath>
#include <vector>

#include "mbv/estimators.hpp"
#include "mbv/simulate.hpp"

namespace naive {

inline double block_average(const mbv::Observations& obs,
                            const mbv::BlockScheme& s, long m) {
  double sum = 0.0;
  for (long i = (m - 1) * s.L; i <= m * s.L - s.K; ++i)
    sum += obs.y[i + s.K] - obs.y[i];
  return sum / static_cast<double>(s.L - s.K);
}

inline double mbv(const mbv::Observations& obs, double r, double l,
                  const mbv::BlockScheme& s) {
  const long stop = l == 0.0 ? s.M : s.M - 1;
  double acc = 0.0;
  for (long m = 1; m <= stop; ++m) {
    double term = std::pow(std::fabs(naive::block_average(obs, s, m)), r);
    if (l > 0.0) term *= std::pow(std::fabs(naive::block_average(obs, s, m + 1)), l);
    acc += term;
  }
  return std::pow(static_cast<double>(s.n), (r + l) / 4.0 - 0.5) * acc;
}

inline double mmv(const mbv::Observations& obs, const std::vector<double>& powers,
                  const mbv::BlockScheme& s) {
  const long k = static_cast<long>(powers.size());
  double rplus = 0.0;
  for (double r : powers) rplus += r;
  double acc = 0.0;
  for (long m = 1; m + k - 1 <= s.M; ++m) {
    double term = 1.0;
    for (long j = 0; j < k; ++j)
      term *= std::pow(std::fabs(naive::block_average(obs, s, m + j)), powers[j]);
    acc += term;
  }
  return std::pow(static_cast<double>(s.n), rplus / 4.0 - 0.5) * acc;
}

}  // namespace naive
