#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mbv/estimators.hpp"
#include "mbv/experiments.hpp"
#include "mbv/math.hpp"
#include "mbv/simulate.hpp"
#include "mbv/ticks.hpp"

namespace {

struct SimulateArgs {
  std::string model = "sv";
  long n = 16384;
  std::uint64_t seed = 1;
  double omega2 = 0.0;
  int jump_count = 0;
  double jump_sd = 0.25;
  int substeps = 1;
  std::string out = "path.csv";
  mbv::SVModelParams params;
};

int run_simulate(const SimulateArgs& a) {
  mbv::SimPath path;
  if (a.model == "sv")
    path = mbv::simulate_sv_path(a.params, a.n, a.seed, a.substeps);
  else if (a.model == "constant")
    path = mbv::simulate_constant_vol_path(a.params.mu, a.n, a.seed);
  else {
    std::cerr << "unknown model '" << a.model << "' (use sv or constant)\n";
    return 1;
  }
  mbv::Observations obs = mbv::add_noise(path, a.omega2, a.seed + 1);
  if (a.jump_count > 0)
    obs = mbv::add_jumps(obs, a.jump_count, a.jump_sd, a.seed + 2);
  mbv::write_path_csv(a.out, path, obs);
  std::printf("wrote %s  n=%ld  iv=%.17g  iq=%.17g\n", a.out.c_str(), a.n,
              path.iv, path.iq);
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::string time_col = "t";
  std::string price_col = "y";
  char delim = ',';
  std::string transform = "log";
  long n = 0;  // 0: ticks-1
  double c1 = 0.25;
  double c2 = 2.0;
  std::optional<double> gamma;
  std::vector<std::string> estimators = {"mrv"};
  double level = 0.95;
  bool floor_zero = false;
  bool fs_nu1 = true;
};

int run_estimate(const EstimateArgs& a) {
  mbv::TickColumns cols;
  cols.time = a.time_col;
  cols.price = a.price_col;
  const bool log_prices = a.transform != "raw";
  const mbv::TickSeries ticks = mbv::load_ticks(a.input, cols, a.delim, log_prices);
  const long n = a.n > 0 ? a.n : static_cast<long>(ticks.timestamps.size()) - 1;
  std::vector<std::string> diagnostics;
  const mbv::Observations obs = mbv::regularize(
      ticks, n,
      a.transform == "raw" ? mbv::PriceTransform::raw : mbv::PriceTransform::log,
      &diagnostics);
  for (const auto& d : diagnostics) std::cerr << "warning: " << d << "\n";

  const mbv::BlockScheme scheme =
      a.gamma ? mbv::make_gamma_scheme(n, a.c1, a.c2, *a.gamma)
              : mbv::make_block_scheme(n, a.c1, a.c2);

  std::printf("estimator,value,feasible_variance,ci_low,ci_high,omega2_hat\n");
  for (const auto& name : a.estimators) {
    mbv::Estimate est;
    if (a.gamma) {
      if (name == "mrv") est = mbv::mrv_gamma(obs, scheme);
      else if (name == "mbv_robust") est = mbv::mbv_robust_gamma(obs, scheme);
      else {
        std::cerr << "estimator '" << name << "' has no gamma-scheme variant\n";
        return 1;
      }
    } else if (name == "mrv") est = mbv::mrv(obs, scheme, a.fs_nu1);
    else if (name == "mrq") est = mbv::mrq(obs, scheme, a.fs_nu1);
    else if (name == "mbv_robust") est = mbv::mbv_robust(obs, scheme, a.fs_nu1);
    else if (name == "mtq") est = mbv::mtq(obs, scheme, a.fs_nu1);
    else {
      std::cerr << "unknown estimator '" << name << "'\n";
      return 1;
    }
    if (est.feasible_variance) {
      const auto [lo, hi] = mbv::confidence_interval(est, a.level);
      est.ci_low = lo;
      est.ci_high = hi;
    }
    const double value = a.floor_zero ? std::max(0.0, est.value) : est.value;
    std::printf("%s,%.17g,", name.c_str(), value);
    if (est.feasible_variance)
      std::printf("%.17g,%.17g,%.17g,", *est.feasible_variance, *est.ci_low,
                  *est.ci_high);
    else
      std::printf(",,,");
    std::printf("%.17g\n", est.omega2_hat);
  }
  return 0;
}

struct MonteCarloArgs {
  std::string preset;
  std::string config;
  int reps = 0;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out = ".";
};

int run_montecarlo(const MonteCarloArgs& a) {
  std::string file = a.config;
  if (file.empty()) {
    if (a.preset.empty()) {
      std::cerr << "montecarlo needs --preset or --config\n";
      return 1;
    }
    file = mbv::preset_path(a.preset);
  }
  auto sections = mbv::parse_experiment_file(file);
  // output files carry the config stem so sections from different presets
  // cannot collide in one directory
  std::string stem = file;
  if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
    stem.erase(0, slash + 1);
  if (const auto dot = stem.find_last_of('.'); dot != std::string::npos)
    stem.erase(dot);
  for (auto& [name, cfg] : sections) {
    if (a.reps > 0) cfg.repetitions = a.reps;
    if (a.seed) cfg.base_seed = *a.seed;
    const auto records = mbv::run_experiment(cfg, a.threads);
    const auto rows = mbv::aggregate(cfg, records);
    const std::string results = a.out + "/" + stem + "_" + name + "_results.csv";
    mbv::write_results_csv(results, rows);
    std::printf("[%s] -> %s\n", name.c_str(), results.c_str());
    for (const auto& row : rows)
      std::printf("  n=%-6ld %-18s mean=%+.5f var=%.5f reps=%ld failures=%ld\n",
                  row.n, row.estimator.c_str(), row.mean, row.variance,
                  row.reps_used, row.failures);
    for (const auto& spec : cfg.estimators) {
      if (spec.kind != mbv::EstimatorSpec::Kind::standardized &&
          spec.kind != mbv::EstimatorSpec::Kind::standardized_log)
        continue;
      for (long n : cfg.n_grid) {
        const auto hist = mbv::histogram_export(cfg, records, spec.name(), n);
        const std::string hpath = a.out + "/" + stem + "_" + name + "_hist_" +
                                  spec.name() + "_n" + std::to_string(n) + ".csv";
        mbv::write_histogram_csv(hpath, hist);
        std::printf("  histogram %s (%zu rows, %ld discarded)\n", hpath.c_str(),
                    hist.rows.size(), hist.discarded);
      }
    }
  }
  return 0;
}

struct ConstantsArgs {
  double c1 = 1.0;
  double c2 = 1.6;
  long n = 0;
  std::vector<double> r;
  std::vector<double> powers;
  std::optional<double> omega;
  std::optional<double> sigma;
};

int run_constants(const ConstantsArgs& a) {
  const auto bc = mbv::bias_constants(a.c1, a.c2);
  std::printf("c1 = %.10g\nc2 = %.10g\n", a.c1, a.c2);
  std::printf("nu1 = %.10g\nnu2 = %.10g\n", bc.nu1, bc.nu2);
  if (a.n > 0)
    std::printf("nu1_n(%ld) = %.10g\n", a.n,
                mbv::finite_sample_nu1(a.n, a.c1, a.c2));
  for (double r : a.r) std::printf("mu_%g = %.10g\n", r, mbv::abs_moment(r));
  if (!a.powers.empty())
    std::printf("A(...) = %.10g\n", mbv::clt_constant_A(a.powers));
  if (a.omega && a.sigma) {
    const auto oc = mbv::optimal_constants(*a.omega, *a.sigma);
    std::printf("optimal c1 = %.10g\noptimal c2 = %.10g\nmin_variance = %.10g\n",
                oc.c1, oc.c2, oc.min_variance);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modulated bipower variation toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "simulate a noisy (jumpy) path to CSV");
  s->add_option("--model", sim.model, "sv or constant");
  s->add_option("--n", sim.n, "grid size");
  s->add_option("--seed", sim.seed, "rng seed");
  s->add_option("--omega2", sim.omega2, "noise variance");
  s->add_option("--jump-count", sim.jump_count, "number of jumps");
  s->add_option("--jump-sd", sim.jump_sd, "jump size standard deviation");
  s->add_option("--substeps", sim.substeps, "Euler refinement factor");
  s->add_option("--out", sim.out, "output CSV path");
  s->add_option("--mu", sim.params.mu);
  s->add_option("--beta0", sim.params.beta0);
  s->add_option("--beta1", sim.params.beta1);
  s->add_option("--alpha", sim.params.alpha);
  s->add_option("--rho", sim.params.rho);
  s->add_option("--tau0", sim.params.tau0);

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "estimate iv/iq from a tick CSV");
  e->add_option("input", est.input, "tick CSV file")->required();
  e->add_option("--time-col", est.time_col, "time column name");
  e->add_option("--price-col", est.price_col, "price column name");
  e->add_option("--delim", est.delim, "field delimiter");
  e->add_option("--transform", est.transform, "log or raw");
  e->add_option("--n", est.n, "grid size (default: ticks - 1)");
  e->add_option("--c1", est.c1);
  e->add_option("--c2", est.c2);
  double gamma_val = 0.0;
  auto* gopt = e->add_option("--gamma", gamma_val, "use the slower-rate scheme");
  e->add_option("--estimator", est.estimators,
                "mrv, mrq, mbv_robust, mtq (repeatable)");
  e->add_option("--level", est.level, "confidence level");
  e->add_flag("--floor-zero", est.floor_zero, "clamp reported values at zero");
  e->add_flag("--finite-sample-nu1,!--no-finite-sample-nu1", est.fs_nu1,
              "finite-sample nu1 refinement (default on)");

  MonteCarloArgs mc;
  auto* m = app.add_subcommand("montecarlo", "run a Monte Carlo experiment");
  m->add_option("--preset", mc.preset, "table1, table2, table3 or figure1");
  m->add_option("--config", mc.config, "experiment config file");
  m->add_option("--reps", mc.reps, "override repetitions");
  std::uint64_t seed_val = 0;
  auto* sopt = m->add_option("--seed", seed_val, "override base seed");
  m->add_option("--threads", mc.threads, "worker threads (0: default)");
  m->add_option("--out", mc.out, "output directory");

  ConstantsArgs con;
  auto* c = app.add_subcommand("constants", "print theory constants");
  c->add_option("--c1", con.c1);
  c->add_option("--c2", con.c2);
  c->add_option("--n", con.n, "also print the finite-sample nu1");
  c->add_option("--r", con.r, "absolute moment orders (repeatable)");
  c->add_option("--powers", con.powers, "powers for the variance constant A");
  double omega_val = 0.0, sigma_val = 0.0;
  auto* oopt = c->add_option("--omega", omega_val);
  auto* sgopt = c->add_option("--sigma", sigma_val);

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return run_simulate(sim);
    if (e->parsed()) {
      if (gopt->count()) est.gamma = gamma_val;
      return run_estimate(est);
    }
    if (m->parsed()) {
      if (sopt->count()) mc.seed = seed_val;
      return run_montecarlo(mc);
    }
    if (c->parsed()) {
      if (oopt->count()) con.omega = omega_val;
      if (sgopt->count()) con.sigma = sigma_val;
      return run_constants(con);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
