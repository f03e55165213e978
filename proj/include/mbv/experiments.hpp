#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbv/estimators.hpp"
#include "mbv/simulate.hpp"

namespace mbv {

struct EstimatorSpec {
  enum class Kind { mrv, mrq, mbv_robust, mtq, mbv_raw, standardized, standardized_log };
  Kind kind = Kind::mrv;
  double r = 0.0;  // mbv_raw only
  double l = 0.0;

  std::string name() const;
  // Accepts mrv | mrq | mbv_robust | mtq | mbv_raw(r,l) | standardized |
  // standardized_log.
  static EstimatorSpec parse(const std::string& text);
};

struct JumpSpec {
  int count = 1;
  double sd = 0.0;  // standard deviation of the jump size
};

struct ExperimentConfig {
  enum class Model { sv, constant_vol };
  Model model = Model::sv;
  std::vector<long> n_grid;
  double omega2 = 0.0;
  double c1 = 0.25;
  double c2 = 2.0;
  std::optional<double> gamma;
  std::optional<JumpSpec> jumps;
  std::vector<EstimatorSpec> estimators;
  int repetitions = 2000;
  std::uint64_t base_seed = 42;
  bool finite_sample_nu1 = true;
  SVModelParams sv_params;  // constant_vol uses sv_params.mu only
};

// One estimator evaluation in one repetition. `error` is estimate minus the
// path's true iv/iq; the raw and standardized statistics are recorded as-is.
struct RepRecord {
  long n = 0;
  int estimator = 0;  // index into config.estimators
  int rep = 0;
  double error = 0.0;
  bool failed = false;
};

struct ResultRow {
  long n = 0;
  std::string estimator;
  double mean = 0.0;
  double variance = 0.0;
  long reps_used = 0;
  long failures = 0;
};

// Runs repetitions 0..R-1 for every n in the grid. Every repetition derives
// its own generator streams from (base_seed, n, rep), so records do not
// depend on scheduling; the output is ordered (n, rep, estimator).
// threads == 0 leaves the OpenMP default in place.
std::vector<RepRecord> run_experiment(const ExperimentConfig& cfg, int threads = 0);

// Plain-loop reference used to validate the parallel path.
std::vector<RepRecord> run_experiment_serial(const ExperimentConfig& cfg);

// Sample mean and unbiased variance of the errors per (n, estimator), with
// failed repetitions dropped and counted. A cell where everything failed
// keeps NaN mean/variance.
std::vector<ResultRow> aggregate(const ExperimentConfig& cfg,
                                 const std::vector<RepRecord>& records);

struct Histogram {
  std::vector<RepRecord> rows;  // surviving repetitions, in rep order
  long discarded = 0;
};

// Raw per-repetition values of one requested statistic (for external
// plotting). Throws if the statistic was not part of the experiment.
Histogram histogram_export(const ExperimentConfig& cfg,
                           const std::vector<RepRecord>& records,
                           const std::string& statistic, long n);

void write_results_csv(const std::string& filename,
                       const std::vector<ResultRow>& rows);
void write_histogram_csv(const std::string& filename, const Histogram& hist);

// Key/value configuration with [section] headers; each section is one
// experiment. Returns (section name, config) pairs in file order.
std::vector<std::pair<std::string, ExperimentConfig>> parse_experiment_file(
    const std::string& filename);

// Locates <name>.cfg in the preset directory (MBV_PRESETS_DIR env variable,
// falling back to the compiled-in source path).
std::string preset_path(const std::string& name);

}  // namespace mbv
