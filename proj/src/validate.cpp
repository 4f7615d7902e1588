#include "ccsim/validate.hpp"

#include <cmath>
#include <complex>
#include <cstdio>

#include "ccsim/channel.hpp"
#include "ccsim/fft.hpp"
#include "ccsim/harness.hpp"
#include "ccsim/receiver.hpp"
#include "ccsim/rng.hpp"

namespace ccsim::validate {

namespace {

using channel::FiberLinkConfig;
using channel::OpticalField;
using channel::WdmConfig;

std::string fmt(const char* format, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), format, a, b);
  return buf;
}

OpticalField random_field(long n, double sample_rate_hz, double mean_power_w, std::uint64_t seed) {
  StreamRng rng(seed);
  OpticalField f;
  f.sample_rate_hz = sample_rate_hz;
  f.x.resize(n);
  f.y.resize(n);
  const double s = std::sqrt(mean_power_w / 4.0);  // per quadrature, split across pols
  for (long i = 0; i < n; ++i) f.x[i] = {s * rng.gaussian(), s * rng.gaussian()};
  for (long i = 0; i < n; ++i) f.y[i] = {s * rng.gaussian(), s * rng.gaussian()};
  return f;
}

double max_rel_error(const OpticalField& a, const OpticalField& b) {
  const double scale = std::sqrt((a.x.abs2() + a.y.abs2()).maxCoeff());
  const double dx = (a.x - b.x).abs().maxCoeff();
  const double dy = (a.y - b.y).abs().maxCoeff();
  return std::max(dx, dy) / scale;
}

// A one-channel shaped frame propagated over the link, received, and scored.
double single_channel_snr(const FiberLinkConfig& link, const WdmConfig& wdm, long payload,
                          std::uint64_t seed, const channel::SsfmOptions& options) {
  mapping::FrameParams params;
  params.alphabet = {{1.0, 3.0, 5.0, 7.0}, {0.4, 0.3, 0.2, 0.1}};
  params.block_length_n = 100;
  params.total_symbols = payload;
  params.fec_block_len = static_cast<int>(payload);
  const auto frame = mapping::build_frame(params, mix_seed(seed, 0x66));
  OpticalField field = channel::rrc_shape(frame, wdm, link.launch_power_dbm);
  StreamRng ase(mix_seed(seed, 0x61));
  channel::propagate_link(field, link, ase, options);
  const auto rx = receiver::rx_frontend(field, wdm, link, payload);
  return receiver::effective_snr_db(rx, frame.symbols_x, frame.symbols_y);
}

CheckResult linear_closed_form() {
  FiberLinkConfig link;
  link.gamma_per_w_km = 0.0;
  link.num_spans = 1;
  const long n = 32768;
  const double fs = 256e9;
  OpticalField field = random_field(n, fs, 1e-3, 11);
  const OpticalField input = field;

  channel::SsfmOptions options;
  options.max_step_m = 1717.0;  // forces several dozen linear segments
  channel::ssfm_span(field, link, options);

  OpticalField ref = input;
  const Fft fft(n);
  const Eigen::ArrayXcd h =
      channel::analytic_linear_response(n, fs, link, link.span_length_km * 1000.0) /
      static_cast<double>(n);
  for (auto* pol : {&ref.x, &ref.y}) {
    fft.forward_inplace(*pol);
    *pol *= h;
    fft.backward_inplace(*pol);
  }

  const double err = max_rel_error(ref, field);
  return {"linear limit (gamma=0) vs closed-form filter",
          err < 1e-9, fmt("max relative error %.3g (tolerance %.0e)", err, 1e-9)};
}

CheckResult spm_closed_form() {
  FiberLinkConfig link;
  link.alpha_db_per_km = 0.0;
  link.dispersion_ps_nm_km = 0.0;
  link.num_spans = 1;
  const long n = 32768;
  const double fs = 256e9;
  OpticalField field = random_field(n, fs, 2e-3, 12);
  field.y.setZero();  // single polarization
  const OpticalField input = field;

  channel::ssfm_span(field, link);

  // With D=0 and alpha=0 the Manakov equation reduces to a pure phase
  // rotation by gamma_eff |A|^2 L.
  const double gamma_eff = channel::kManakovFactor * link.gamma_per_w_km * 1e-3;
  const double length_m = link.span_length_km * 1000.0;
  OpticalField ref = input;
  for (long i = 0; i < n; ++i)
    ref.x[i] *= std::polar(1.0, gamma_eff * std::norm(input.x[i]) * length_m);

  const double err = max_rel_error(ref, field);
  return {"nonlinear limit (D=0, alpha=0) vs SPM closed form",
          err < 1e-6, fmt("max relative error %.3g (tolerance %.0e)", err, 1e-6)};
}

CheckResult span_energy_conservation() {
  FiberLinkConfig link;
  link.num_spans = 1;
  OpticalField field = random_field(16384, 256e9, 3e-3, 13);
  const double energy_in = field.energy();
  channel::ssfm_span(field, link);
  const double ratio = field.energy() / energy_in;
  const double expected = channel::db_to_linear(-link.span_loss_db());
  const double err = std::abs(ratio / expected - 1.0);
  return {"span energy = input x 10^(-alpha L / 10)",
          err < 1e-6, fmt("relative energy error %.3g (tolerance %.0e)", err, 1e-6)};
}

CheckResult edfa_noise_variance() {
  FiberLinkConfig link;
  const double fs = 256e9;
  OpticalField field;
  field.sample_rate_hz = fs;
  field.x = Eigen::ArrayXcd::Zero(500000);
  field.y = Eigen::ArrayXcd::Zero(500000);
  StreamRng rng(14);
  channel::edfa(field, link.span_loss_db(), link.edfa_noise_figure_db,
                link.carrier_frequency_hz(), rng);

  const double gain = channel::db_to_linear(link.span_loss_db());
  const double n_sp = channel::db_to_linear(link.edfa_noise_figure_db) / 2.0;
  const double expected = (gain - 1.0) * 6.62607015e-34 * link.carrier_frequency_hz() * n_sp * fs;
  const double measured = 0.5 * (field.x.abs2().mean() + field.y.abs2().mean());
  const double err = std::abs(measured / expected - 1.0);
  return {"EDFA noise variance vs (G-1) h nu n_sp PSD",
          err < 0.02, fmt("relative variance error %.3g (tolerance %.2f)", err, 0.02)};
}

CheckResult ase_budget_snr() {
  FiberLinkConfig link;
  link.gamma_per_w_km = 0.0;  // ASE only, full span count
  WdmConfig wdm;
  wdm.num_channels = 1;
  const double snr = single_channel_snr(link, wdm, 21600, 15, {});
  const double expected = channel::analytic_ase_snr_db(link, wdm);
  const double err = std::abs(snr - expected);
  return {"multi-span ASE budget vs analytic SNR",
          err < 0.1, fmt("simulated minus analytic = %.3f dB (tolerance %.1f dB)", snr - expected, 0.1)};
}

CheckResult step_size_convergence() {
  FiberLinkConfig link;
  link.num_spans = 2;
  WdmConfig wdm;
  wdm.num_channels = 1;
  const long payload = 8192;

  auto snr_at = [&](double phase_cap) {
    FiberLinkConfig l = link;
    l.max_nl_phase_rad = phase_cap;
    return single_channel_snr(l, wdm, payload, 16, {});
  };
  const double base = snr_at(1e-3);
  const double halved = snr_at(5e-4);
  const double doubled = snr_at(2e-3);
  const double d_half = std::abs(base - halved);
  const double d_double = std::abs(base - doubled);
  const bool pass = d_half < 0.02 && d_double < 0.01;
  return {"split-step self-convergence in max_nl_phase",
          pass, fmt("|SNR change| halving %.4f dB, doubling %.4f dB", d_half, d_double)};
}

}  // namespace

std::vector<CheckResult> run_checks(bool quick) {
  std::vector<CheckResult> results;
  results.push_back(linear_closed_form());
  results.push_back(spm_closed_form());
  results.push_back(span_energy_conservation());
  results.push_back(edfa_noise_variance());
  results.push_back(ase_budget_snr());
  if (!quick) results.push_back(step_size_convergence());
  return results;
}

}  // namespace ccsim::validate
