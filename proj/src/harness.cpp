#include "ccsim/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "ccsim/receiver.hpp"
#include "ccsim/rng.hpp"

namespace ccsim::harness {

namespace {

constexpr std::uint64_t kTagFrame = 0x6672616d;
constexpr std::uint64_t kTagAse = 0x61736520;

std::uint64_t coordinate_seed(const ExperimentConfig& config, int n, mapping::Pairing pairing,
                              bool interleave, int run_index) {
  return mix_seed(config.base_seed, static_cast<std::uint64_t>(n),
                  pairing == mapping::Pairing::intra ? 0u : 1u, interleave ? 1u : 0u,
                  static_cast<std::uint64_t>(run_index));
}

// %.6g, with inf/nan spelled out the glibc way ("inf", "nan").
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

RunRow run_single(const ExperimentConfig& config, int block_length_n, mapping::Pairing pairing,
                  bool interleave, int run_index) {
  const auto t0 = std::chrono::steady_clock::now();

  RunRow row;
  row.block_length_n = block_length_n;
  row.pairing = pairing;
  row.interleaved = interleave;
  row.run_index = run_index;
  row.seed = coordinate_seed(config, block_length_n, pairing, interleave, run_index);

  try {
    const long payload = config.payload_symbols_per_run();
    const int num_channels = config.wdm.num_channels;
    const int center = num_channels / 2;
    const long num_samples =
        (payload + channel::kCyclicGuardSymbols) * static_cast<long>(config.wdm.oversampling);

    mapping::FrameParams params;
    params.alphabet = config.alphabet;
    params.block_length_n = block_length_n;
    params.pairing = pairing;
    params.total_symbols = payload;
    params.interleave = interleave;
    params.fec_block_len = config.fec_block_len;

    const double nyquist_guard =
        config.wdm.symbol_rate_hz * (1.0 + config.wdm.rolloff) / 2.0;
    channel::WdmAccumulator mux(num_samples, config.wdm.sample_rate_hz(), nyquist_guard);
    mapping::QamFrame center_frame;
    for (int ch = 0; ch < num_channels; ++ch) {
      mapping::QamFrame frame = mapping::build_frame(params, mix_seed(row.seed, kTagFrame, ch));
      const channel::OpticalField field =
          channel::rrc_shape(frame, config.wdm, config.link.launch_power_dbm);
      mux.add(field, (ch - (num_channels - 1) / 2.0) * config.wdm.spacing_hz);
      if (ch == center) center_frame = std::move(frame);
    }

    channel::OpticalField field = mux.finish();
    StreamRng ase_rng(mix_seed(row.seed, kTagAse));
    channel::propagate_link(field, config.link, ase_rng);

    const receiver::SymbolStreams rx =
        receiver::rx_frontend(field, config.wdm, config.link, payload);
    row.snr_db = receiver::effective_snr_db(rx, center_frame.symbols_x, center_frame.symbols_y);
    row.metrics = metrics::analyze_frame(center_frame, mapping::make_constellation(config.alphabet));
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }

  row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

SweepResult run_sweep(const ExperimentConfig& config, const ProgressSink& progress) {
  struct Job {
    int n;
    mapping::Pairing pairing;
    bool interleave;
    int run_index;
  };
  std::vector<Job> jobs;
  for (int n : config.block_lengths)
    for (const auto pairing : config.pairings)
      for (const int flag : config.interleave_flags)
        for (int run = 0; run < config.num_runs; ++run)
          jobs.push_back({n, pairing, flag != 0, run});

  SweepResult result;
  result.rows.resize(jobs.size());

  std::mutex progress_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      result.rows[i] = run_single(config, job.n, job.pairing, job.interleave, job.run_index);
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        const RunRow& row = result.rows[i];
        char buf[160];
        std::snprintf(buf, sizeof(buf), "[%zu/%zu] n=%d %s interleave=%d run=%d %s (%.1f s)",
                      finished, jobs.size(), job.n, mapping::to_string(job.pairing),
                      job.interleave ? 1 : 0, job.run_index,
                      row.failed ? ("FAILED: " + row.error).c_str()
                                 : ("snr=" + fmt(row.snr_db) + " dB").c_str(),
                      row.wall_s);
        progress(buf);
      }
    }
  };

  int num_workers = config.workers > 0 ? config.workers
                                       : static_cast<int>(std::thread::hardware_concurrency());
  if (num_workers < 1) num_workers = 1;
  num_workers = std::min<int>(num_workers, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  pool.reserve(num_workers);
  for (int w = 0; w < num_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Aggregate per coordinate, in sweep order.
  for (int n : config.block_lengths) {
    for (const auto pairing : config.pairings) {
      for (const int flag : config.interleave_flags) {
        AggregateRow agg;
        agg.block_length_n = n;
        agg.pairing = pairing;
        agg.interleaved = flag != 0;
        std::vector<double> snrs;
        for (const RunRow& row : result.rows) {
          if (row.block_length_n != n || row.pairing != pairing ||
              row.interleaved != (flag != 0) || row.failed)
            continue;
          snrs.push_back(row.snr_db);
          agg.kl_mean += row.metrics.kl_bits;
          agg.kurtosis_mean += row.metrics.kurtosis_2d;
          agg.run_ratio_mean += row.metrics.run_ratio;
          agg.run_ratio_abs_mean += row.metrics.run_ratio_abs;
          agg.run_ratio_arg_mean += row.metrics.run_ratio_arg;
        }
        agg.num_runs = static_cast<int>(snrs.size());
        if (agg.num_runs == 0) continue;
        const double inv = 1.0 / agg.num_runs;
        agg.kl_mean *= inv;
        agg.kurtosis_mean *= inv;
        agg.run_ratio_mean *= inv;
        agg.run_ratio_abs_mean *= inv;
        agg.run_ratio_arg_mean *= inv;
        double mean = 0.0;
        for (double s : snrs) mean += s;
        mean *= inv;
        agg.snr_mean_db = mean;
        if (agg.num_runs >= 2) {
          double ss = 0.0;
          for (double s : snrs) ss += (s - mean) * (s - mean);
          const double sd = std::sqrt(ss / (agg.num_runs - 1));
          const double half = 1.96 * sd / std::sqrt(static_cast<double>(agg.num_runs));
          agg.has_ci = true;
          agg.ci_low_db = mean - half;
          agg.ci_high_db = mean + half;
        }
        result.aggregates.push_back(agg);
      }
    }
  }
  return result;
}

std::string csv_text(const SweepResult& result, bool include_timing) {
  std::string out =
      "n,pairing,interleaved,run,snr_db,kl_bits,kurtosis,run_ratio,run_ratio_abs,"
      "run_ratio_arg,ci_low_db,ci_high_db,seed,wall_s,aggregate\n";

  auto coordinate = [](int n, mapping::Pairing pairing, bool interleaved) {
    return std::to_string(n) + "," + mapping::to_string(pairing) + "," + (interleaved ? "1" : "0");
  };

  // Run rows for one coordinate, then its aggregate row.
  for (const AggregateRow& agg : result.aggregates) {
    for (const RunRow& row : result.rows) {
      if (row.block_length_n != agg.block_length_n || row.pairing != agg.pairing ||
          row.interleaved != agg.interleaved)
        continue;
      out += coordinate(row.block_length_n, row.pairing, row.interleaved);
      out += "," + std::to_string(row.run_index) + ",";
      if (row.failed) {
        out += ",,,,,";  // snr + four metric columns stay empty
      } else {
        out += fmt(row.snr_db) + "," + fmt(row.metrics.kl_bits) + "," +
               fmt(row.metrics.kurtosis_2d) + "," + fmt(row.metrics.run_ratio) + "," +
               fmt(row.metrics.run_ratio_abs) + "," + fmt(row.metrics.run_ratio_arg);
      }
      out += ",,,";  // per-run rows carry no CI
      out += std::to_string(row.seed) + ",";
      out += fmt(include_timing ? row.wall_s : 0.0);
      out += ",0\n";
    }
    out += coordinate(agg.block_length_n, agg.pairing, agg.interleaved);
    out += ",,";  // no run index
    out += fmt(agg.snr_mean_db) + "," + fmt(agg.kl_mean) + "," + fmt(agg.kurtosis_mean) + "," +
           fmt(agg.run_ratio_mean) + "," + fmt(agg.run_ratio_abs_mean) + "," +
           fmt(agg.run_ratio_arg_mean) + ",";
    if (agg.has_ci)
      out += fmt(agg.ci_low_db) + "," + fmt(agg.ci_high_db);
    else
      out += ",";
    out += ",,";  // seed, then wall_s below
    out += fmt(0.0);
    out += ",1\n";
  }
  return out;
}

void emit_csv(const SweepResult& result, const std::string& path, bool include_timing) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os << csv_text(result, include_timing);
  if (!os) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace ccsim::harness
