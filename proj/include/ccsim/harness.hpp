#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ccsim/channel.hpp"
#include "ccsim/mapping.hpp"
#include "ccsim/metrics.hpp"

// Experiment configuration, sweep orchestration over (block length, pairing,
// interleaving) x Monte-Carlo runs, aggregation with confidence intervals,
// and CSV persistence.

namespace ccsim::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  channel::WdmConfig wdm;
  channel::FiberLinkConfig link;
  shaping::AmplitudeAlphabet alphabet{{1.0, 3.0, 5.0, 7.0}, {0.4, 0.3, 0.2, 0.1}};
  std::vector<int> block_lengths{10, 100, 1000, 10000};
  std::vector<mapping::Pairing> pairings{mapping::Pairing::intra};
  std::vector<int> interleave_flags{0};
  long symbols_per_run = 500000;  // nominal; floored to whole FEC blocks
  int num_runs = 10;
  std::uint64_t base_seed = 1;
  std::string output_path = "sweep.csv";
  int workers = 0;  // 0 = hardware concurrency
  int fec_block_len = 10800;
  std::vector<std::string> warnings;  // filled by validate()

  // Largest multiple of fec_block_len not above symbols_per_run.
  long payload_symbols_per_run() const;
  void validate();
};

enum class Scale { desk, paper };

// desk: 3 channels, 5 spans, 2^16 symbols, 4 runs. paper: the full defaults.
void apply_scale(ExperimentConfig& config, Scale scale);

// Key-value sections with optional unit suffixes; empty input yields the
// full defaults. Unknown keys are rejected with their section.key path.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct RunRow {
  int block_length_n = 0;
  mapping::Pairing pairing = mapping::Pairing::intra;
  bool interleaved = false;
  int run_index = 0;
  bool failed = false;
  std::string error;
  double snr_db = 0.0;
  metrics::MetricsReport metrics;
  std::uint64_t seed = 0;
  double wall_s = 0.0;
};

struct AggregateRow {
  int block_length_n = 0;
  mapping::Pairing pairing = mapping::Pairing::intra;
  bool interleaved = false;
  int num_runs = 0;
  double snr_mean_db = 0.0;
  bool has_ci = false;
  double ci_low_db = 0.0, ci_high_db = 0.0;
  double kl_mean = 0.0, kurtosis_mean = 0.0;
  double run_ratio_mean = 0.0, run_ratio_abs_mean = 0.0, run_ratio_arg_mean = 0.0;
};

struct SweepResult {
  std::vector<RunRow> rows;
  std::vector<AggregateRow> aggregates;
};

using ProgressSink = std::function<void(const std::string&)>;

// One complete pipeline run: frames for every channel and polarization,
// pulse shaping, WDM mux, propagation, center-channel reception, metrics.
// Deterministic given (config, coordinates, run index).
RunRow run_single(const ExperimentConfig& config, int block_length_n, mapping::Pairing pairing,
                  bool interleave, int run_index);

// All (coordinate, run) jobs on a worker pool; rows are ordered by sweep
// coordinates regardless of scheduling. Failed propagations are recorded as
// failed rows and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& config, const ProgressSink& progress = {});

// Header, one row per (coordinates, run), aggregate rows flagged in the
// trailing column. Floats use 6 significant digits. wall_s is written as 0
// unless include_timing is set, keeping same-seed re-runs byte-identical.
std::string csv_text(const SweepResult& result, bool include_timing = false);
void emit_csv(const SweepResult& result, const std::string& path, bool include_timing = false);

}  // namespace ccsim::harness
