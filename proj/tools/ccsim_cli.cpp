// Command-line front end: experiment sweeps, symbol-file metrics, the CCDM
// codec, and the analytic propagation checks.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccsim/harness.hpp"
#include "ccsim/metrics.hpp"
#include "ccsim/symbol_file.hpp"
#include "ccsim/validate.hpp"

namespace {

using namespace ccsim;

std::vector<int> parse_int_list(const std::string& s, const char* what) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    try {
      out.push_back(std::stoi(s.substr(pos, next - pos)));
    } catch (const std::exception&) {
      throw std::runtime_error(std::string(what) + ": cannot parse '" + s + "'");
    }
    pos = next + 1;
  }
  if (out.empty()) throw std::runtime_error(std::string(what) + ": empty list");
  return out;
}

int run_sweep_command(const std::string& config_path, const std::string& scale,
                      bool have_seed, std::uint64_t seed, const std::string& out_path, int runs,
                      long symbols, int workers, bool timing, bool quiet) {
  harness::ExperimentConfig config =
      config_path.empty() ? harness::ExperimentConfig{} : harness::load_config(config_path);
  if (config_path.empty()) config.validate();

  if (scale == "desk")
    harness::apply_scale(config, harness::Scale::desk);
  else if (scale == "paper")
    harness::apply_scale(config, harness::Scale::paper);
  else if (!scale.empty())
    throw std::runtime_error("unknown --scale '" + scale + "' (expected desk or paper)");

  if (const char* env = std::getenv("RNG_SEED"); env && !have_seed)
    config.base_seed = std::strtoull(env, nullptr, 10);
  if (have_seed) config.base_seed = seed;
  if (!out_path.empty()) config.output_path = out_path;
  if (runs > 0) config.num_runs = runs;
  if (symbols > 0) config.symbols_per_run = symbols;
  if (workers > 0) config.workers = workers;
  config.validate();
  for (const auto& w : config.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  harness::ProgressSink progress;
  if (!quiet) progress = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };

  const harness::SweepResult result = harness::run_sweep(config, progress);
  harness::emit_csv(result, config.output_path, timing);
  if (!quiet) std::fprintf(stderr, "wrote %s\n", config.output_path.c_str());

  for (const auto& row : result.rows)
    if (row.failed) {
      std::fprintf(stderr, "error: %d run(s) failed; see CSV for coordinates\n", 1);
      return 1;
    }
  return 0;
}

int run_metrics_command(const std::string& path, const std::string& amplitudes,
                        const std::string& pmf) {
  const mapping::QamFrame frame = io::read_symbol_file(path);

  shaping::AmplitudeAlphabet alphabet{{1.0, 3.0, 5.0, 7.0}, {0.4, 0.3, 0.2, 0.1}};
  if (!amplitudes.empty()) {
    alphabet.amplitudes.clear();
    for (int a : parse_int_list(amplitudes, "--amplitudes")) alphabet.amplitudes.push_back(a);
  }
  if (!pmf.empty()) {
    alphabet.target_pmf.clear();
    std::size_t pos = 0;
    while (pos < pmf.size()) {
      std::size_t next = pmf.find(',', pos);
      if (next == std::string::npos) next = pmf.size();
      alphabet.target_pmf.push_back(std::stod(pmf.substr(pos, next - pos)));
      pos = next + 1;
    }
  }

  const auto constellation = mapping::make_constellation(alphabet);
  const metrics::MetricsReport r = metrics::analyze_frame(frame, constellation);
  std::printf("n,pairing,interleaved,n_sim,kl_bits,kurtosis,run_ratio,run_ratio_abs,run_ratio_arg\n");
  std::printf("%d,%s,%d,%ld,%.6g,%.6g,%.6g,%.6g,%.6g\n", r.block_length_n,
              mapping::to_string(r.pairing), r.interleaved ? 1 : 0, r.n_sim, r.kl_bits,
              r.kurtosis_2d, r.run_ratio, r.run_ratio_abs, r.run_ratio_arg);
  return 0;
}

int run_ccdm_command(bool encode, const std::string& composition_str, const std::string& bits_str,
                     const std::string& symbols_str) {
  shaping::Composition composition;
  for (int c : parse_int_list(composition_str, "--composition")) composition.counts.push_back(c);
  composition.validate();
  const int k = shaping::input_bit_length(composition);

  if (encode) {
    if (bits_str.empty())
      throw std::runtime_error("ccdm encode: need --bits with exactly " + std::to_string(k) +
                               " bits for this composition");
    shaping::BitVector bits;
    for (char c : bits_str) {
      if (c != '0' && c != '1') throw std::runtime_error("--bits: expected a 0/1 string");
      bits.push_back(c == '1');
    }
    const auto seq = shaping::ccdm_encode(bits, composition);
    for (std::size_t i = 0; i < seq.symbols.size(); ++i)
      std::printf("%s%d", i ? "," : "", static_cast<int>(seq.symbols[i]));
    std::printf("\n");
    return 0;
  }

  if (symbols_str.empty()) throw std::runtime_error("ccdm decode: need --symbols");
  shaping::AmplitudeSequence seq;
  for (int s : parse_int_list(symbols_str, "--symbols"))
    seq.symbols.push_back(static_cast<std::uint8_t>(s));
  const auto bits = shaping::ccdm_decode(seq, composition);
  for (auto b : bits) std::printf("%c", b ? '1' : '0');
  std::printf("\n");
  return 0;
}

int run_validate_command(bool quick) {
  int failures = 0;
  for (const auto& check : validate::run_checks(quick)) {
    std::printf("%s  %s: %s\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                check.detail.c_str());
    failures += check.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-length constant-composition shaping over a nonlinear WDM fiber link"};
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run the (block length x pairing x interleaving) sweep");
  std::string config_path, scale, out_path;
  std::uint64_t seed = 0;
  int runs = 0, workers = 0;
  long symbols = 0;
  bool timing = false, quiet = false;
  sweep->add_option("config", config_path, "Config file (omit for built-in defaults)");
  sweep->add_option("--scale", scale, "Preset: desk or paper");
  auto* seed_opt = sweep->add_option("--seed", seed, "Base seed (overrides config and RNG_SEED)");
  sweep->add_option("--out", out_path, "Output CSV path");
  sweep->add_option("--runs", runs, "Override number of runs");
  sweep->add_option("--symbols", symbols, "Override symbols per run");
  sweep->add_option("--workers", workers, "Worker threads (default: hardware)");
  sweep->add_flag("--timing", timing, "Record wall time in the CSV (breaks byte-identical re-runs)");
  sweep->add_flag("--quiet", quiet, "Suppress progress output");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Analyze a binary symbol file");
  std::string symfile, amplitudes, pmf;
  metrics_cmd->add_option("file", symfile, "Symbol file")->required();
  metrics_cmd->add_option("--amplitudes", amplitudes, "One-sided amplitudes (default 1,3,5,7)");
  metrics_cmd->add_option("--pmf", pmf, "Target PMF (default 0.4,0.3,0.2,0.1)");

  // ccdm
  auto* ccdm = app.add_subcommand("ccdm", "Constant-composition distribution matcher");
  ccdm->require_subcommand(1);
  auto* enc = ccdm->add_subcommand("encode", "Bits to amplitude-index sequence");
  auto* dec = ccdm->add_subcommand("decode", "Amplitude-index sequence to bits");
  std::string composition_str, bits_str, symbols_str;
  for (auto* cmd : {enc, dec})
    cmd->add_option("--composition", composition_str, "Counts, e.g. 4,3,2,1")->required();
  enc->add_option("--bits", bits_str, "Input bits as a 0/1 string");
  dec->add_option("--symbols", symbols_str, "Amplitude indices, e.g. 0,1,0,3,...");

  // validate
  auto* val = app.add_subcommand("validate", "Run the analytic propagation checks");
  bool quick = false;
  val->add_flag("--quick", quick, "Skip the split-step convergence study");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed())
      return run_sweep_command(config_path, scale, seed_opt->count() > 0, seed, out_path, runs,
                               symbols, workers, timing, quiet);
    if (metrics_cmd->parsed()) return run_metrics_command(symfile, amplitudes, pmf);
    if (ccdm->parsed()) return run_ccdm_command(enc->parsed(), composition_str, bits_str, symbols_str);
    if (val->parsed()) return run_validate_command(quick);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
