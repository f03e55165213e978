#include "mbv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mbv/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mbv {

namespace {

// Stream indices for per-repetition seed derivation.
enum : std::uint64_t { kPathStream = 0, kNoiseStream = 1, kJumpStream = 2 };

void run_one(const ExperimentConfig& cfg, const BlockScheme& scheme, long n,
             int rep, RepRecord* out) {
  SimPath path =
      cfg.model == ExperimentConfig::Model::sv
          ? simulate_sv_path(cfg.sv_params, n,
                             derive_seed(cfg.base_seed, n, rep, kPathStream))
          : simulate_constant_vol_path(
                cfg.sv_params.mu, n,
                derive_seed(cfg.base_seed, n, rep, kPathStream));
  Observations obs =
      add_noise(path, cfg.omega2, derive_seed(cfg.base_seed, n, rep, kNoiseStream));
  if (cfg.jumps && cfg.jumps->count > 0)
    obs = add_jumps(obs, cfg.jumps->count, cfg.jumps->sd,
                    derive_seed(cfg.base_seed, n, rep, kJumpStream));

  const bool gamma = scheme.gamma > 0.0;
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    const EstimatorSpec& spec = cfg.estimators[e];
    RepRecord rec;
    rec.n = n;
    rec.estimator = static_cast<int>(e);
    rec.rep = rep;
    switch (spec.kind) {
      case EstimatorSpec::Kind::mrv:
        rec.error = (gamma ? mrv_gamma(obs, scheme).value
                           : mrv(obs, scheme, cfg.finite_sample_nu1).value) -
                    path.iv;
        break;
      case EstimatorSpec::Kind::mrq:
        rec.error = mrq(obs, scheme, cfg.finite_sample_nu1).value - path.iq;
        break;
      case EstimatorSpec::Kind::mbv_robust:
        rec.error = (gamma ? mbv_robust_gamma(obs, scheme).value
                           : mbv_robust(obs, scheme, cfg.finite_sample_nu1).value) -
                    path.iv;
        break;
      case EstimatorSpec::Kind::mtq:
        rec.error = mtq(obs, scheme, cfg.finite_sample_nu1).value - path.iq;
        break;
      case EstimatorSpec::Kind::mbv_raw: {
        if (gamma) {
          const std::vector<double> powers =
              spec.l == 0.0 ? std::vector<double>{spec.r}
                            : std::vector<double>{spec.r, spec.l};
          rec.error = mmv_gamma(obs, powers, scheme);
        } else {
          rec.error = mbv(obs, spec.r, spec.l, scheme);
        }
        break;
      }
      case EstimatorSpec::Kind::standardized:
      case EstimatorSpec::Kind::standardized_log: {
        const bool log_form = spec.kind == EstimatorSpec::Kind::standardized_log;
        const auto stat = standardized_iv_stat(obs, scheme, path.iv, log_form,
                                               cfg.finite_sample_nu1);
        if (stat) {
          rec.error = *stat;
        } else {
          rec.failed = true;
          rec.error = std::numeric_limits<double>::quiet_NaN();
        }
        break;
      }
    }
    out[e] = rec;
  }
}

std::vector<RepRecord> run_impl(const ExperimentConfig& cfg, int threads,
                                bool parallel) {
  if (cfg.repetitions < 1)
    throw std::invalid_argument("run_experiment: repetitions must be >= 1");
  if (cfg.n_grid.empty())
    throw std::invalid_argument("run_experiment: n_grid must be nonempty");
  if (cfg.estimators.empty())
    throw std::invalid_argument("run_experiment: no estimators requested");
  if (cfg.gamma) {
    for (const auto& spec : cfg.estimators) {
      if (spec.kind == EstimatorSpec::Kind::mrq ||
          spec.kind == EstimatorSpec::Kind::mtq ||
          spec.kind == EstimatorSpec::Kind::standardized ||
          spec.kind == EstimatorSpec::Kind::standardized_log)
        throw std::runtime_error("run_experiment: estimator " + spec.name() +
                                 " has no gamma-scheme variant");
    }
  }

  // Build every scheme up front so an infeasible configuration aborts before
  // any simulation work.
  std::vector<BlockScheme> schemes;
  schemes.reserve(cfg.n_grid.size());
  for (long n : cfg.n_grid)
    schemes.push_back(cfg.gamma ? make_gamma_scheme(n, cfg.c1, cfg.c2, *cfg.gamma)
                                : make_block_scheme(n, cfg.c1, cfg.c2));

  const long R = cfg.repetitions;
  const long E = static_cast<long>(cfg.estimators.size());
  const long per_n = R * E;
  std::vector<RepRecord> records(cfg.n_grid.size() * per_n);

  const long tasks = static_cast<long>(cfg.n_grid.size()) * R;
  if (parallel) {
#ifdef _OPENMP
    const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nt)
    for (long t = 0; t < tasks; ++t) {
      const long ni = t / R;
      const long rep = t % R;
      run_one(cfg, schemes[ni], cfg.n_grid[ni], static_cast<int>(rep),
              records.data() + ni * per_n + rep * E);
    }
#else
    (void)threads;
    for (long t = 0; t < tasks; ++t) {
      const long ni = t / R;
      const long rep = t % R;
      run_one(cfg, schemes[ni], cfg.n_grid[ni], static_cast<int>(rep),
              records.data() + ni * per_n + rep * E);
    }
#endif
  } else {
    for (long t = 0; t < tasks; ++t) {
      const long ni = t / R;
      const long rep = t % R;
      run_one(cfg, schemes[ni], cfg.n_grid[ni], static_cast<int>(rep),
              records.data() + ni * per_n + rep * E);
    }
  }
  return records;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

std::string EstimatorSpec::name() const {
  switch (kind) {
    case Kind::mrv: return "mrv";
    case Kind::mrq: return "mrq";
    case Kind::mbv_robust: return "mbv_robust";
    case Kind::mtq: return "mtq";
    case Kind::standardized: return "standardized";
    case Kind::standardized_log: return "standardized_log";
    case Kind::mbv_raw: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "mbv_raw(%g,%g)", r, l);
      return buf;
    }
  }
  return "?";
}

EstimatorSpec EstimatorSpec::parse(const std::string& text) {
  const std::string t = trim(text);
  EstimatorSpec spec;
  if (t == "mrv") spec.kind = Kind::mrv;
  else if (t == "mrq") spec.kind = Kind::mrq;
  else if (t == "mbv_robust") spec.kind = Kind::mbv_robust;
  else if (t == "mtq") spec.kind = Kind::mtq;
  else if (t == "standardized") spec.kind = Kind::standardized;
  else if (t == "standardized_log") spec.kind = Kind::standardized_log;
  else if (t.rfind("mbv_raw(", 0) == 0 && t.back() == ')') {
    spec.kind = Kind::mbv_raw;
    const auto inner = t.substr(8, t.size() - 9);
    const auto parts = split(inner, ',');
    if (parts.size() != 2)
      throw std::runtime_error("estimator spec needs two powers: " + text);
    spec.r = std::stod(parts[0]);
    spec.l = std::stod(parts[1]);
  } else {
    throw std::runtime_error("unknown estimator: " + text);
  }
  return spec;
}

std::vector<RepRecord> run_experiment(const ExperimentConfig& cfg, int threads) {
  return run_impl(cfg, threads, true);
}

std::vector<RepRecord> run_experiment_serial(const ExperimentConfig& cfg) {
  return run_impl(cfg, 0, false);
}

std::vector<ResultRow> aggregate(const ExperimentConfig& cfg,
                                 const std::vector<RepRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  // Keyed by (n, estimator index). Values are sorted by repetition before
  // summation, so permuting the records cannot change any output bit.
  std::map<std::pair<long, int>, std::vector<std::pair<int, double>>> errors;
  std::map<std::pair<long, int>, long> failures;
  for (const auto& rec : records) {
    const auto key = std::make_pair(rec.n, rec.estimator);
    if (rec.failed) {
      ++failures[key];
      errors[key];
    } else {
      errors[key].emplace_back(rec.rep, rec.error);
    }
  }
  std::vector<ResultRow> rows;
  for (auto& [key, vals] : errors) {
    std::sort(vals.begin(), vals.end());
    ResultRow row;
    row.n = key.first;
    row.estimator = cfg.estimators[key.second].name();
    row.reps_used = static_cast<long>(vals.size());
    row.failures = failures.count(key) ? failures[key] : 0;
    if (vals.empty()) {
      row.mean = std::numeric_limits<double>::quiet_NaN();
      row.variance = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (const auto& [rep, v] : vals) sum += v;
      row.mean = sum / static_cast<double>(vals.size());
      double ss = 0.0;
      for (const auto& [rep, v] : vals) ss += (v - row.mean) * (v - row.mean);
      row.variance = vals.size() > 1
                         ? ss / static_cast<double>(vals.size() - 1)
                         : 0.0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Histogram histogram_export(const ExperimentConfig& cfg,
                           const std::vector<RepRecord>& records,
                           const std::string& statistic, long n) {
  int index = -1;
  for (std::size_t e = 0; e < cfg.estimators.size(); ++e)
    if (cfg.estimators[e].name() == statistic) index = static_cast<int>(e);
  if (index < 0)
    throw std::runtime_error("histogram_export: statistic not in experiment: " +
                             statistic);
  Histogram hist;
  for (const auto& rec : records) {
    if (rec.estimator != index || rec.n != n) continue;
    if (rec.failed)
      ++hist.discarded;
    else
      hist.rows.push_back(rec);
  }
  std::sort(hist.rows.begin(), hist.rows.end(),
            [](const RepRecord& a, const RepRecord& b) { return a.rep < b.rep; });
  return hist;
}

void write_results_csv(const std::string& filename,
                       const std::vector<ResultRow>& rows) {
  std::FILE* f = std::fopen(filename.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + filename);
  std::fputs("n,estimator,mean,variance,reps,failures\n", f);
  for (const auto& row : rows)
    std::fprintf(f, "%ld,%s,%.17g,%.17g,%ld,%ld\n", row.n, row.estimator.c_str(),
                 row.mean, row.variance, row.reps_used, row.failures);
  std::fclose(f);
}

void write_histogram_csv(const std::string& filename, const Histogram& hist) {
  std::FILE* f = std::fopen(filename.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open " + filename);
  std::fputs("rep,value\n", f);
  for (const auto& rec : hist.rows)
    std::fprintf(f, "%d,%.17g\n", rec.rep, rec.error);
  std::fclose(f);
}

std::vector<std::pair<std::string, ExperimentConfig>> parse_experiment_file(
    const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw std::runtime_error("cannot open config file " + filename);

  std::vector<std::pair<std::string, ExperimentConfig>> sections;
  ExperimentConfig* cur = nullptr;
  std::optional<int> jump_count;
  std::optional<double> jump_sd;
  std::string line;
  long lineno = 0;

  auto finish_jumps = [&]() {
    if (cur && (jump_count || jump_sd)) {
      JumpSpec js;
      js.count = jump_count.value_or(1);
      if (!jump_sd)
        throw std::runtime_error(filename + ": jump_count without jump_sd");
      js.sd = *jump_sd;
      cur->jumps = js;
    }
    jump_count.reset();
    jump_sd.reset();
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error(filename + ":" + std::to_string(lineno) +
                                 ": malformed section header");
      finish_jumps();
      sections.emplace_back(trim(t.substr(1, t.size() - 2)), ExperimentConfig{});
      cur = &sections.back().second;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos || !cur)
      throw std::runtime_error(filename + ":" + std::to_string(lineno) +
                               ": expected key = value inside a section");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "model") {
        if (val == "sv") cur->model = ExperimentConfig::Model::sv;
        else if (val == "constant_vol") cur->model = ExperimentConfig::Model::constant_vol;
        else throw std::runtime_error("model must be sv or constant_vol");
      } else if (key == "n_grid") {
        cur->n_grid.clear();
        for (const auto& p : split(val, ',')) cur->n_grid.push_back(std::stol(p));
      } else if (key == "omega2") cur->omega2 = std::stod(val);
      else if (key == "c1") cur->c1 = std::stod(val);
      else if (key == "c2") cur->c2 = std::stod(val);
      else if (key == "gamma") cur->gamma = std::stod(val);
      else if (key == "jump_count") jump_count = std::stoi(val);
      else if (key == "jump_sd") jump_sd = std::stod(val);
      else if (key == "estimators") {
        cur->estimators.clear();
        // split on commas not inside parentheses
        std::string item;
        int depth = 0;
        for (char ch : val + ",") {
          if (ch == '(') ++depth;
          if (ch == ')') --depth;
          if (ch == ',' && depth == 0) {
            if (!trim(item).empty())
              cur->estimators.push_back(EstimatorSpec::parse(trim(item)));
            item.clear();
          } else {
            item += ch;
          }
        }
      } else if (key == "repetitions") cur->repetitions = std::stoi(val);
      else if (key == "base_seed") cur->base_seed = std::stoull(val);
      else if (key == "finite_sample_nu1") cur->finite_sample_nu1 = val == "true" || val == "1";
      else if (key == "mu") cur->sv_params.mu = std::stod(val);
      else if (key == "beta0") cur->sv_params.beta0 = std::stod(val);
      else if (key == "beta1") cur->sv_params.beta1 = std::stod(val);
      else if (key == "alpha") cur->sv_params.alpha = std::stod(val);
      else if (key == "rho") cur->sv_params.rho = std::stod(val);
      else if (key == "tau0") cur->sv_params.tau0 = std::stod(val);
      else throw std::runtime_error("unknown key: " + key);
    } catch (const std::exception& e) {
      throw std::runtime_error(filename + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  finish_jumps();
  if (sections.empty())
    throw std::runtime_error(filename + ": no [section] found");
  return sections;
}

std::string preset_path(const std::string& name) {
  std::string dir;
  if (const char* env = std::getenv("MBV_PRESETS_DIR")) dir = env;
#ifdef MBV_PRESETS_DIR
  if (dir.empty()) dir = MBV_PRESETS_DIR;
#endif
  if (dir.empty()) dir = "presets";
  return dir + "/" + name + ".cfg";
}

}  // namespace mbv
