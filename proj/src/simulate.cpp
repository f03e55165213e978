#include "mbv/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mbv/rng.hpp"

namespace mbv {

SimPath simulate_sv_path(const SVModelParams& params, long n, std::uint64_t seed,
                         int substeps) {
  if (n < 2) throw std::invalid_argument("simulate_sv_path: n must be >= 2");
  if (std::fabs(params.rho) > 1.0)
    throw std::invalid_argument("simulate_sv_path: |rho| must be <= 1");
  if (substeps < 1)
    throw std::invalid_argument("simulate_sv_path: substeps must be >= 1");

  Rng rng(seed);
  const long nf = n * substeps;
  const double dt = 1.0 / static_cast<double>(nf);
  const double sdt = std::sqrt(dt);
  const double rho = params.rho;
  const double rho_c = std::sqrt(1.0 - rho * rho);

  SimPath path;
  path.n = n;
  path.x.resize(n + 1);
  path.sigma.resize(n + 1);

  double x = 0.0;
  double tau = params.tau0;
  double iv = 0.0;
  double iq = 0.0;
  path.x[0] = x;
  path.sigma[0] = std::exp(params.beta0 + params.beta1 * tau);
  for (long i = 0; i < nf; ++i) {
    const double sig = std::exp(params.beta0 + params.beta1 * tau);
    const double s2 = sig * sig;
    iv += s2 * dt;
    iq += s2 * s2 * dt;
    const double z1 = rng.gaussian();
    const double z2 = rng.gaussian();
    x += params.mu * dt + sig * sdt * z1;
    tau += params.alpha * tau * dt + sdt * (rho * z1 + rho_c * z2);
    if ((i + 1) % substeps == 0) {
      const long k = (i + 1) / substeps;
      path.x[k] = x;
      path.sigma[k] = std::exp(params.beta0 + params.beta1 * tau);
    }
  }
  path.iv = iv;
  path.iq = iq;
  return path;
}

SimPath simulate_constant_vol_path(double mu, long n, std::uint64_t seed) {
  if (n < 2)
    throw std::invalid_argument("simulate_constant_vol_path: n must be >= 2");
  Rng rng(seed);
  const double dt = 1.0 / static_cast<double>(n);
  const double sdt = std::sqrt(dt);

  SimPath path;
  path.n = n;
  path.x.resize(n + 1);
  path.sigma.assign(n + 1, 1.0);
  double x = 0.0;
  path.x[0] = x;
  for (long i = 0; i < n; ++i) {
    x += mu * dt + sdt * rng.gaussian();
    path.x[i + 1] = x;
  }
  path.iv = 1.0;
  path.iq = 1.0;
  return path;
}

Observations add_noise(const SimPath& path, double omega2, std::uint64_t seed) {
  if (omega2 < 0.0) throw std::invalid_argument("add_noise: omega2 must be >= 0");
  Observations obs;
  obs.n = path.n;
  obs.noise_omega2 = omega2;
  obs.y = path.x;
  if (omega2 > 0.0) {
    Rng rng(seed);
    const double w = std::sqrt(omega2);
    for (auto& v : obs.y) v += w * rng.gaussian();
  }
  return obs;
}

Observations add_jumps(const Observations& obs, int count, double h,
                       std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("add_jumps: count must be >= 1");
  if (h <= 0.0) throw std::invalid_argument("add_jumps: h must be > 0");
  Observations out = obs;
  Rng rng(seed);
  for (int j = 0; j < count; ++j) {
    const double u = rng.uniform();
    const long a = static_cast<long>(std::ceil(u * static_cast<double>(obs.n)));
    const double size = h * rng.gaussian();
    for (long i = a; i <= out.n; ++i) out.y[i] += size;
    out.jumps.push_back(Jump{a, size});
  }
  return out;
}

void write_path_csv(const std::string& filename, const SimPath& path,
                    const Observations& obs) {
  if (obs.n != path.n)
    throw std::invalid_argument("write_path_csv: path and observations disagree on n");
  std::FILE* f = std::fopen(filename.c_str(), "wb");
  if (!f) throw std::runtime_error("write_path_csv: cannot open " + filename);
  std::fputs("i,t,x,sigma,y\n", f);
  const double n = static_cast<double>(path.n);
  for (long i = 0; i <= path.n; ++i) {
    std::fprintf(f, "%ld,%.17g,%.17g,%.17g,%.17g\n", i,
                 static_cast<double>(i) / n, path.x[i], path.sigma[i], obs.y[i]);
  }
  std::fclose(f);
}

}  // namespace mbv
