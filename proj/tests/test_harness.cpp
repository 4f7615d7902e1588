#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ccsim/harness.hpp"
#include "ccsim/symbol_file.hpp"

using namespace ccsim;
using namespace ccsim::harness;

namespace {

// Small, fast configuration: one channel, one span, one FEC block per run.
ExperimentConfig tiny_config() {
  ExperimentConfig config;
  config.wdm.num_channels = 1;
  config.link.num_spans = 1;
  config.symbols_per_run = 10800;
  config.num_runs = 2;
  config.block_lengths = {10, 100};
  config.pairings = {mapping::Pairing::intra};
  config.interleave_flags = {0};
  config.base_seed = 7;
  config.workers = 2;
  config.validate();
  return config;
}

}  // namespace

TEST_CASE("empty config text yields the full defaults") {
  ExperimentConfig config = parse_config_text("");
  CHECK(config.wdm.num_channels == 5);
  CHECK(config.wdm.symbol_rate_hz == doctest::Approx(32e9));
  CHECK(config.wdm.spacing_hz == doctest::Approx(50e9));
  CHECK(config.wdm.rolloff == doctest::Approx(0.1));
  CHECK(config.wdm.oversampling == 8);
  CHECK(config.link.span_length_km == doctest::Approx(80.0));
  CHECK(config.link.num_spans == 10);
  CHECK(config.link.alpha_db_per_km == doctest::Approx(0.2));
  CHECK(config.link.dispersion_ps_nm_km == doctest::Approx(17.0));
  CHECK(config.link.gamma_per_w_km == doctest::Approx(1.37));
  CHECK(config.link.edfa_noise_figure_db == doctest::Approx(6.0));
  CHECK(config.link.launch_power_dbm == doctest::Approx(-0.5));
  CHECK(config.link.max_nl_phase_rad == doctest::Approx(1e-3));
  CHECK(config.alphabet.target_pmf == std::vector<double>{0.4, 0.3, 0.2, 0.1});
  CHECK(config.symbols_per_run == 500000);
  CHECK(config.num_runs == 10);
  CHECK(config.fec_block_len == 10800);
}

TEST_CASE("config parsing: units, sections, errors") {
  const auto config = parse_config_text(
      "[fiber]\n"
      "launch_power = -0.5 dBm\n"
      "span_length = 40 km\n"
      "[wdm]\n"
      "spacing = 25 GHz\n"
      "symbol_rate = 16 GBd\n"
      "[sweep]\n"
      "block_lengths = 20, 200\n"
      "interleave = off, on\n"
      "runs = 3\n");
  CHECK(config.link.launch_power_dbm == doctest::Approx(-0.5));
  CHECK(config.link.span_length_km == doctest::Approx(40.0));
  CHECK(config.wdm.spacing_hz == doctest::Approx(25e9));
  CHECK(config.wdm.symbol_rate_hz == doctest::Approx(16e9));
  CHECK(config.block_lengths == std::vector<int>{20, 200});
  CHECK(config.interleave_flags == std::vector<int>{0, 1});
  CHECK(config.num_runs == 3);

  CHECK_THROWS_WITH_AS(parse_config_text("[fiber]\nspans = -3\n"),
                       doctest::Contains("num_spans"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[fiber]\nspan_count = 3\n"),
                       doctest::Contains("fiber.span_count"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[sweep]\nruns = 2\nruns = 3\n"),
                       doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[wdm]\nchannels = 4\n"), ConfigError);
}

TEST_CASE("scale presets") {
  ExperimentConfig config = parse_config_text("");
  apply_scale(config, Scale::desk);
  CHECK(config.wdm.num_channels == 3);
  CHECK(config.link.num_spans == 5);
  CHECK(config.symbols_per_run == 65536);
  CHECK(config.num_runs == 4);
  CHECK(config.payload_symbols_per_run() == 64800);

  apply_scale(config, Scale::paper);
  CHECK(config.wdm.num_channels == 5);
  CHECK(config.link.num_spans == 10);
  CHECK(config.payload_symbols_per_run() == 496800);
}

TEST_CASE("low symbol budget only warns") {
  ExperimentConfig config = parse_config_text("[sweep]\nsymbols_per_run = 21600\n");
  CHECK(config.warnings.size() == 1);
}

TEST_CASE("csv: empty sweep emits just the header") {
  SweepResult empty;
  const std::string text = csv_text(empty);
  CHECK(text ==
        "n,pairing,interleaved,run,snr_db,kl_bits,kurtosis,run_ratio,run_ratio_abs,"
        "run_ratio_arg,ci_low_db,ci_high_db,seed,wall_s,aggregate\n");
}

TEST_CASE("sweep on a tiny system: aggregates, determinism, timing column") {
  const ExperimentConfig config = tiny_config();
  const SweepResult result = run_sweep(config);

  REQUIRE(result.rows.size() == 4);
  REQUIRE(result.aggregates.size() == 2);
  for (const auto& row : result.rows) {
    REQUIRE(!row.failed);
    CHECK(row.snr_db > 10.0);
    CHECK(row.snr_db < 40.0);
    CHECK(row.metrics.n_sim == 10800);
  }

  // Aggregate mean equals the arithmetic mean of its runs; CI is present.
  for (const auto& agg : result.aggregates) {
    double mean = 0.0;
    int count = 0;
    for (const auto& row : result.rows)
      if (row.block_length_n == agg.block_length_n) {
        mean += row.snr_db;
        ++count;
      }
    mean /= count;
    CHECK(agg.num_runs == count);
    CHECK(agg.snr_mean_db == doctest::Approx(mean).epsilon(1e-12));
    CHECK(agg.has_ci);
    CHECK(agg.ci_low_db <= agg.snr_mean_db);
    CHECK(agg.ci_high_db >= agg.snr_mean_db);
  }

  // Shorter blocks shuffle more.
  CHECK(result.aggregates[0].run_ratio_mean > result.aggregates[1].run_ratio_mean);

  // Same seed, same bytes; the timing column is the only nondeterministic one.
  const SweepResult again = run_sweep(config);
  CHECK(csv_text(result) == csv_text(again));
  CHECK(csv_text(result) != csv_text(again, /*include_timing=*/true));

  // run_single reproduces a sweep row coordinate for coordinate.
  const RunRow row = run_single(config, 10, mapping::Pairing::intra, false, 1);
  CHECK(row.snr_db == result.rows[1].snr_db);
  CHECK(row.seed == result.rows[1].seed);
}

TEST_CASE("failed propagation becomes a failed row and the sweep continues") {
  ExperimentConfig config = tiny_config();
  config.num_runs = 1;
  config.wdm.num_channels = 3;
  config.wdm.spacing_hz = 130e9;  // pushes the outer channels past Nyquist
  const SweepResult result = run_sweep(config);
  REQUIRE(result.rows.size() == 2);
  for (const auto& row : result.rows) {
    CHECK(row.failed);
    CHECK(!row.error.empty());
  }
  CHECK(result.aggregates.empty());
  const std::string text = csv_text(result);
  CHECK(text.find("Nyquist") == std::string::npos);  // errors stay out of the CSV
}

TEST_CASE("emit_csv writes the file it promises") {
  const ExperimentConfig config = [] {
    ExperimentConfig c = tiny_config();
    c.num_runs = 1;
    c.block_lengths = {10};
    return c;
  }();
  const SweepResult result = run_sweep(config);
  const std::string path = "harness_test_sweep.csv";
  emit_csv(result, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line.substr(0, 2) == "n,");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);  // one run row + one aggregate row
  std::remove(path.c_str());
}

TEST_CASE("symbol files round-trip through the mapping external format") {
  mapping::FrameParams params;
  params.alphabet = {{1, 3, 5, 7}, {0.4, 0.3, 0.2, 0.1}};
  params.block_length_n = 10;
  params.total_symbols = 1080;
  params.fec_block_len = 1080;
  const auto frame = mapping::build_frame(params, 42);

  const std::string path = "harness_test_symbols.bin";
  io::write_symbol_file(path, frame);
  const auto loaded = io::read_symbol_file(path);
  CHECK(loaded.block_length_n == 10);
  CHECK(loaded.pairing == mapping::Pairing::intra);
  CHECK(loaded.seed == 42);
  CHECK((loaded.symbols_x == frame.symbols_x).all());
  CHECK((loaded.symbols_y == frame.symbols_y).all());
  std::remove(path.c_str());

  CHECK_THROWS_AS(io::read_symbol_file("does_not_exist.bin"), io::IoError);
}
