#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccsim/mapping.hpp"
#include "ccsim/rng.hpp"

// Transmit DSP and nonlinear fiber propagation: root-raised-cosine pulse
// shaping on a cyclic frame, WDM multiplexing, symmetrized split-step
// Fourier propagation of the Manakov equation with adaptive step size, and
// EDFA amplification with ASE loading.

namespace ccsim::channel {

struct ChannelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sampled dual-polarization complex baseband waveform; |sample|^2 is
// instantaneous power in W.
struct OpticalField {
  Eigen::ArrayXcd x, y;
  double sample_rate_hz = 0.0;
  double center_offset_hz = 0.0;

  long size() const { return static_cast<long>(x.size()); }
  double mean_power_w() const;
  double energy() const;
};

struct WdmConfig {
  int num_channels = 5;  // odd, center channel is measured
  double spacing_hz = 50e9;
  double symbol_rate_hz = 32e9;
  double rolloff = 0.1;
  int oversampling = 8;

  double sample_rate_hz() const { return symbol_rate_hz * oversampling; }
  void validate() const;
};

struct FiberLinkConfig {
  double span_length_km = 80.0;
  int num_spans = 10;
  double alpha_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;
  double gamma_per_w_km = 1.37;
  double edfa_noise_figure_db = 6.0;
  double launch_power_dbm = -0.5;
  double max_nl_phase_rad = 1e-3;
  double reference_wavelength_nm = 1550.0;

  double span_loss_db() const { return alpha_db_per_km * span_length_km; }
  // Group-velocity dispersion beta2 in s^2/m from D at the reference wavelength.
  double beta2_s2_per_m() const;
  // Power attenuation coefficient in 1/m.
  double alpha_per_m() const;
  double carrier_frequency_hz() const;
  void validate() const;
};

// Manakov cross-polarization averaging factor of the propagation equation.
inline constexpr double kManakovFactor = 8.0 / 9.0;

// Cyclic guard appended to every frame before pulse shaping; stripped at the
// receiver and excluded from all metrics.
inline constexpr int kCyclicGuardSymbols = 1024;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }

// Root-raised-cosine amplitude response on the length-n DFT grid, normalized
// so that the TX/RX pair is Nyquist with unit end-to-end gain and the
// discrete taps have unit energy.
Eigen::ArrayXd rrc_spectrum(long n, int oversampling, double rolloff);

// Upsample, RRC-filter (exact frequency-domain response on the cyclic frame)
// and scale so the mean dual-pol power equals the launch power. The guard is
// a cyclic extension: the first guard_symbols payload symbols are repeated
// at the end.
OpticalField rrc_shape(const mapping::QamFrame& frame, const WdmConfig& wdm, double power_dbm,
                       int guard_symbols = kCyclicGuardSymbols);

// Sum of the fields shifted to (k - (K-1)/2) * spacing. Offsets are realized
// as exact circular spectral shifts (rounded to the nearest DFT bin).
OpticalField wdm_mux(const std::vector<OpticalField>& fields, double spacing_hz);

// Streaming variant of wdm_mux: channels are folded into the aggregate
// spectrum one at a time so only one per-channel field is alive at once.
class WdmAccumulator {
 public:
  WdmAccumulator(long num_samples, double sample_rate_hz, double nyquist_guard_hz);
  void add(const OpticalField& field, double offset_hz);
  OpticalField finish();

 private:
  Eigen::ArrayXcd spec_x_, spec_y_;
  double sample_rate_hz_;
  double nyquist_guard_hz_;
  bool finished_ = false;
};

struct SsfmOptions {
  // Upper bound on the split step, mainly for convergence studies and for
  // exercising the multi-step linear path.
  double max_step_m = std::numeric_limits<double>::infinity();
};

struct SpanStats {
  long steps = 0;
};

// One span of symmetrized split-step propagation. The step size solves
// gamma_eff * P_peak * L_eff(dz) = max_nl_phase with the peak recomputed
// every step; the nonlinear phase uses the loss-corrected effective length.
SpanStats ssfm_span(OpticalField& field, const FiberLinkConfig& link, const SsfmOptions& options = {});

// Flat gain plus circular complex ASE per polarization with PSD
// (G-1) * h * nu * n_sp, n_sp = 10^(NF/10)/2.
void edfa(OpticalField& field, double gain_db, double noise_figure_db, double carrier_frequency_hz,
          StreamRng& rng);

struct LinkStats {
  long total_steps = 0;
};

// num_spans x (ssfm_span -> gain-matched edfa). Deterministic given the rng seed.
LinkStats propagate_link(OpticalField& field, const FiberLinkConfig& link, StreamRng& rng,
                         const SsfmOptions& options = {});

// Closed-form single-pass linear response (attenuation + dispersion) over
// length_m, on the DFT grid of n samples. Includes no 1/n factor.
Eigen::ArrayXcd analytic_linear_response(long n, double sample_rate_hz, const FiberLinkConfig& link,
                                         double length_m);

// Analytic dual-pol SNR of the gain-matched multi-span ASE budget.
double analytic_ase_snr_db(const FiberLinkConfig& link, const WdmConfig& wdm);

}  // namespace ccsim::channel
