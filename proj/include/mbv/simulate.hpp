#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mbv {

// Log-volatility OU model:
//   dX = mu dt + sigma_t dW,  sigma_t = exp(beta0 + beta1 tau_t),
//   dtau = alpha tau dt + dB, corr(dW, dB) = rho.
struct SVModelParams {
  double mu = 0.03;
  double beta0 = 0.3125;
  double beta1 = 0.125;
  double alpha = -0.025;
  double rho = -0.3;
  double tau0 = 0.0;
};

// A latent path on the grid i/n, i = 0..n, with its spot volatilities and the
// Riemann-sum values of integrated volatility and quarticity.
struct SimPath {
  long n = 0;
  std::vector<double> x;      // n+1 latent log prices
  std::vector<double> sigma;  // n+1 spot volatilities
  double iv = 0.0;
  double iq = 0.0;
};

struct Jump {
  long index = 0;  // first grid index shifted by the jump
  double size = 0.0;
};

// Noisy (optionally jumpy) observations on the grid i/n.
struct Observations {
  long n = 0;
  std::vector<double> y;  // n+1 values
  double noise_omega2 = 0.0;
  std::vector<Jump> jumps;
};

// Euler scheme with step 1/n on the observation grid itself (substeps > 1
// refines the latent path by that factor while observing every substeps-th
// point; the iv/iq sums then run over the fine grid).
SimPath simulate_sv_path(const SVModelParams& params, long n, std::uint64_t seed,
                         int substeps = 1);

// sigma == 1 throughout, so iv = iq = 1 exactly.
SimPath simulate_constant_vol_path(double mu, long n, std::uint64_t seed);

// y_i = x_i + U_i with U_i iid N(0, omega2); omega2 == 0 copies x unchanged.
Observations add_noise(const SimPath& path, double omega2, std::uint64_t seed);

// Adds `count` jumps: arrival u ~ U(0,1) mapped to index ceil(u n), size
// N(0, h^2), added to every observation from the arrival index on.
Observations add_jumps(const Observations& obs, int count, double h,
                       std::uint64_t seed);

// CSV dump, header "i,t,x,sigma,y", 17 significant digits.
void write_path_csv(const std::string& filename, const SimPath& path,
                    const Observations& obs);

}  // namespace mbv
