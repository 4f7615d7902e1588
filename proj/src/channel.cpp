#include "ccsim/channel.hpp"

#include <cmath>

#include "ccsim/fft.hpp"

namespace ccsim::channel {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kSpeedOfLight = 299792458.0;     // m/s
constexpr double kPlanck = 6.62607015e-34;        // J s

// omega^2 on the DFT grid, omega = 2*pi*f, f in (-fs/2, fs/2].
Eigen::ArrayXd omega_squared(long n, double sample_rate_hz) {
  Eigen::ArrayXd w2(n);
  const double df = sample_rate_hz / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const double f = (i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i - n)) * df;
    const double w = 2.0 * kPi * f;
    w2[i] = w * w;
  }
  return w2;
}

// Scratch arrays reused across the thousands of steps of one span.
struct StepWorkspace {
  Eigen::ArrayXd theta, cos_t, sin_t;
  explicit StepWorkspace(long n) : theta(n), cos_t(n), sin_t(n) {}
};

// Multiplies both polarizations by the unimodular rotation (cos, sin) times
// amp. The trig arrays come from Eigen's vectorized kernels; the complex
// multiply is memory-bound either way.
void rotate_both(Eigen::ArrayXcd& x, Eigen::ArrayXcd& y, const StepWorkspace& w, double amp) {
  auto* px = x.data();
  auto* py = y.data();
  const double* pc = w.cos_t.data();
  const double* ps = w.sin_t.data();
  const long n = x.size();
  for (long i = 0; i < n; ++i) {
    const std::complex<double> h(amp * pc[i], amp * ps[i]);
    px[i] *= h;
    py[i] *= h;
  }
}

// amp * exp(j * phase_scale * w2[i]) on both polarizations.
void apply_linear_operator(Eigen::ArrayXcd& x, Eigen::ArrayXcd& y, const Eigen::ArrayXd& w2,
                           double amp, double phase_scale, StepWorkspace& w) {
  w.theta = phase_scale * w2;
  w.cos_t = w.theta.cos();
  w.sin_t = w.theta.sin();
  rotate_both(x, y, w, amp);
}

// Common Manakov phase rotation exp(j * c * (|x|^2 + |y|^2)) on both pols.
void apply_nonlinear_rotation(Eigen::ArrayXcd& x, Eigen::ArrayXcd& y, double c, StepWorkspace& w) {
  w.theta = c * (x.abs2() + y.abs2());
  w.cos_t = w.theta.cos();
  w.sin_t = w.theta.sin();
  rotate_both(x, y, w, 1.0);
}

double peak_total_power(const Eigen::ArrayXcd& x, const Eigen::ArrayXcd& y) {
  return (x.abs2() + y.abs2()).maxCoeff();
}

}  // namespace

double OpticalField::mean_power_w() const {
  if (x.size() == 0) return 0.0;
  return (x.abs2().sum() + y.abs2().sum()) / static_cast<double>(x.size());
}

double OpticalField::energy() const { return x.abs2().sum() + y.abs2().sum(); }

void WdmConfig::validate() const {
  if (num_channels < 1 || num_channels % 2 == 0)
    throw ChannelError("wdm: num_channels must be odd and positive");
  if (spacing_hz <= 0 || symbol_rate_hz <= 0) throw ChannelError("wdm: rates must be positive");
  if (rolloff < 0 || rolloff > 1) throw ChannelError("wdm: rolloff must lie in [0,1]");
  if (oversampling < 2) throw ChannelError("wdm: oversampling must be at least 2");
  const double edge =
      (num_channels - 1) / 2 * spacing_hz + symbol_rate_hz * (1.0 + rolloff) / 2.0;
  if (edge >= sample_rate_hz() / 2.0)
    throw ChannelError("wdm: aggregate band exceeds the Nyquist range");
}

double FiberLinkConfig::beta2_s2_per_m() const {
  const double d_si = dispersion_ps_nm_km * 1e-6;  // s/m^2
  const double lambda_m = reference_wavelength_nm * 1e-9;
  return -d_si * lambda_m * lambda_m / (2.0 * kPi * kSpeedOfLight);
}

double FiberLinkConfig::alpha_per_m() const {
  return alpha_db_per_km * std::log(10.0) / 10.0 / 1000.0;
}

double FiberLinkConfig::carrier_frequency_hz() const {
  return kSpeedOfLight / (reference_wavelength_nm * 1e-9);
}

void FiberLinkConfig::validate() const {
  if (span_length_km <= 0) throw ChannelError("fiber: span_length must be positive");
  if (num_spans < 1) throw ChannelError("fiber: num_spans must be at least 1");
  if (alpha_db_per_km < 0) throw ChannelError("fiber: attenuation must be non-negative");
  if (gamma_per_w_km < 0) throw ChannelError("fiber: gamma must be non-negative");
  if (max_nl_phase_rad <= 0) throw ChannelError("fiber: max_nl_phase must be positive");
  if (reference_wavelength_nm <= 0) throw ChannelError("fiber: reference_wavelength must be positive");
}

Eigen::ArrayXd rrc_spectrum(long n, int oversampling, double rolloff) {
  Eigen::ArrayXd g(n);
  const double beta = rolloff;
  for (long i = 0; i < n; ++i) {
    // Frequency in symbol-rate units.
    const double nu =
        std::abs((i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i - n))) *
        static_cast<double>(oversampling) / static_cast<double>(n);
    double rc;
    if (nu <= (1.0 - beta) / 2.0) {
      rc = 1.0;
    } else if (beta > 0.0 && nu <= (1.0 + beta) / 2.0) {
      rc = 0.5 * (1.0 + std::cos(kPi * (nu - (1.0 - beta) / 2.0) / beta));
    } else {
      rc = 0.0;
    }
    g[i] = std::sqrt(static_cast<double>(oversampling) * rc);
  }
  return g;
}

OpticalField rrc_shape(const mapping::QamFrame& frame, const WdmConfig& wdm, double power_dbm,
                       int guard_symbols) {
  wdm.validate();
  const long payload = frame.size();
  if (payload == 0) throw ChannelError("rrc_shape: empty frame");
  if (guard_symbols < 0 || guard_symbols > payload)
    throw ChannelError("rrc_shape: guard must be between 0 and the payload length");

  const int os = wdm.oversampling;
  const long total_symbols = payload + guard_symbols;
  const long n = total_symbols * os;
  const Fft fft(n);
  const Eigen::ArrayXd g = rrc_spectrum(n, os, wdm.rolloff);
  const double inv_n = 1.0 / static_cast<double>(n);

  OpticalField field;
  field.sample_rate_hz = wdm.sample_rate_hz();
  for (int pol = 0; pol < 2; ++pol) {
    const Eigen::ArrayXcd& syms = pol == 0 ? frame.symbols_x : frame.symbols_y;
    Eigen::ArrayXcd& out = pol == 0 ? field.x : field.y;
    out = Eigen::ArrayXcd::Zero(n);
    for (long k = 0; k < total_symbols; ++k)
      out[k * os] = syms[k < payload ? k : k - payload];  // cyclic guard
    fft.forward_inplace(out);
    out *= (g * inv_n).cast<std::complex<double>>();
    fft.backward_inplace(out);
  }

  const double target_w = dbm_to_watt(power_dbm);
  const double measured_w = field.mean_power_w();
  if (measured_w <= 0.0) throw ChannelError("rrc_shape: zero-power frame");
  const double s = std::sqrt(target_w / measured_w);
  field.x *= s;
  field.y *= s;
  return field;
}

WdmAccumulator::WdmAccumulator(long num_samples, double sample_rate_hz, double nyquist_guard_hz)
    : spec_x_(Eigen::ArrayXcd::Zero(num_samples)),
      spec_y_(Eigen::ArrayXcd::Zero(num_samples)),
      sample_rate_hz_(sample_rate_hz),
      nyquist_guard_hz_(nyquist_guard_hz) {}

void WdmAccumulator::add(const OpticalField& field, double offset_hz) {
  if (finished_) throw ChannelError("wdm_mux: accumulator already finished");
  const long n = spec_x_.size();
  if (field.size() != n || field.sample_rate_hz != sample_rate_hz_)
    throw ChannelError("wdm_mux: fields must share length and sample rate");
  if (std::abs(offset_hz) + nyquist_guard_hz_ >= sample_rate_hz_ / 2.0)
    throw ChannelError("wdm_mux: channel band exceeds the Nyquist range");

  const long shift = std::lround(offset_hz / sample_rate_hz_ * static_cast<double>(n));
  const Fft fft(n);
  Eigen::ArrayXcd sx = field.x;
  Eigen::ArrayXcd sy = field.y;
  fft.forward_inplace(sx);
  fft.forward_inplace(sy);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const long j = ((i + shift) % n + n) % n;
    spec_x_[j] += sx[i] * inv_n;
    spec_y_[j] += sy[i] * inv_n;
  }
}

OpticalField WdmAccumulator::finish() {
  if (finished_) throw ChannelError("wdm_mux: accumulator already finished");
  finished_ = true;
  const long n = spec_x_.size();
  const Fft fft(n);
  OpticalField out;
  out.sample_rate_hz = sample_rate_hz_;
  out.x = std::move(spec_x_);
  out.y = std::move(spec_y_);
  fft.backward_inplace(out.x);
  fft.backward_inplace(out.y);
  return out;
}

OpticalField wdm_mux(const std::vector<OpticalField>& fields, double spacing_hz) {
  if (fields.empty()) throw ChannelError("wdm_mux: no channels");
  const int k = static_cast<int>(fields.size());
  WdmAccumulator acc(fields[0].size(), fields[0].sample_rate_hz, 0.0);
  for (int c = 0; c < k; ++c) {
    const double offset = (c - (k - 1) / 2.0) * spacing_hz;
    acc.add(fields[c], offset);
  }
  return acc.finish();
}

SpanStats ssfm_span(OpticalField& field, const FiberLinkConfig& link, const SsfmOptions& options) {
  link.validate();
  const long n = field.size();
  if (n == 0 || field.y.size() != n) throw ChannelError("ssfm_span: malformed field");

  const double span_m = link.span_length_km * 1000.0;
  const double alpha = link.alpha_per_m();
  const double beta2 = link.beta2_s2_per_m();
  const double gamma_eff = kManakovFactor * link.gamma_per_w_km * 1e-3;  // 1/(W m)
  const double phi_max = link.max_nl_phase_rad;
  const double energy_in = field.energy();

  const Fft fft(n);
  const Eigen::ArrayXd w2 = omega_squared(n, field.sample_rate_hz);
  const double inv_n = 1.0 / static_cast<double>(n);
  StepWorkspace workspace(n);

  // Loss-corrected effective length of a step.
  auto effective_length = [&](double dz) {
    return alpha > 0.0 ? -std::expm1(-alpha * dz) / alpha : dz;
  };
  // Largest dz with gamma_eff * peak * L_eff(dz) <= phi_max.
  auto choose_step = [&](double remaining) {
    const double drive = gamma_eff * peak_total_power(field.x, field.y);
    double dz = remaining;
    if (drive > 0.0) {
      if (alpha > 0.0) {
        const double a = 1.0 - alpha * phi_max / drive;
        dz = a <= 0.0 ? remaining : std::min(remaining, -std::log(a) / alpha);
      } else {
        dz = std::min(remaining, phi_max / drive);
      }
    }
    return std::min(dz, options.max_step_m);
  };
  auto linear = [&](double dz) {
    fft.forward_inplace(field.x);
    fft.forward_inplace(field.y);
    apply_linear_operator(field.x, field.y, w2, std::exp(-alpha * dz / 2.0) * inv_n,
                          beta2 / 2.0 * dz, workspace);
    fft.backward_inplace(field.x);
    fft.backward_inplace(field.y);
  };

  SpanStats stats;
  double z = 0.0;
  double dz = choose_step(span_m);
  linear(dz / 2.0);
  for (;;) {
    // Field sits at the step midpoint; the exp(+alpha dz/2) undoes the
    // half-step loss so the rotation integrates the true power profile.
    const double weight = std::exp(alpha * dz / 2.0) * effective_length(dz);
    apply_nonlinear_rotation(field.x, field.y, gamma_eff * weight, workspace);
    ++stats.steps;
    z += dz;
    const double remaining = span_m - z;
    if (remaining <= span_m * 1e-12) {
      linear(dz / 2.0);
      break;
    }
    const double dz_next = choose_step(remaining);
    linear((dz + dz_next) / 2.0);
    dz = dz_next;
  }

  const double energy_out = field.energy();
  const double expected = energy_in * db_to_linear(-link.span_loss_db());
  if (!std::isfinite(energy_out) || energy_out > energy_in * 10.0 + 1.0)
    throw ChannelError("ssfm_span: energy blow-up after " + std::to_string(stats.steps) +
                       " steps (in " + std::to_string(energy_in) + " W, out " +
                       std::to_string(energy_out) + " W, expected " + std::to_string(expected) + " W)");
  return stats;
}

void edfa(OpticalField& field, double gain_db, double noise_figure_db, double carrier_frequency_hz,
          StreamRng& rng) {
  const double gain = db_to_linear(gain_db);
  const double amp = std::sqrt(gain);
  const double n_sp = db_to_linear(noise_figure_db) / 2.0;
  const double psd = (gain - 1.0) * kPlanck * carrier_frequency_hz * n_sp;  // W/Hz per pol
  const double sigma = std::sqrt(std::max(0.0, psd * field.sample_rate_hz / 2.0));  // per quadrature

  for (Eigen::ArrayXcd* pol : {&field.x, &field.y}) {
    auto* p = pol->data();
    const long n = pol->size();
    for (long i = 0; i < n; ++i) {
      p[i] = amp * p[i] + std::complex<double>(sigma * rng.gaussian(), sigma * rng.gaussian());
    }
  }
}

LinkStats propagate_link(OpticalField& field, const FiberLinkConfig& link, StreamRng& rng,
                         const SsfmOptions& options) {
  link.validate();
  LinkStats stats;
  for (int span = 0; span < link.num_spans; ++span) {
    stats.total_steps += ssfm_span(field, link, options).steps;
    edfa(field, link.span_loss_db(), link.edfa_noise_figure_db, link.carrier_frequency_hz(), rng);
  }
  return stats;
}

Eigen::ArrayXcd analytic_linear_response(long n, double sample_rate_hz, const FiberLinkConfig& link,
                                         double length_m) {
  const Eigen::ArrayXd w2 = omega_squared(n, sample_rate_hz);
  const double amp = std::exp(-link.alpha_per_m() * length_m / 2.0);
  const double c = link.beta2_s2_per_m() / 2.0 * length_m;
  Eigen::ArrayXcd h(n);
  for (long i = 0; i < n; ++i) h[i] = std::polar(amp, c * w2[i]);
  return h;
}

double analytic_ase_snr_db(const FiberLinkConfig& link, const WdmConfig& wdm) {
  const double gain = db_to_linear(link.span_loss_db());
  const double n_sp = db_to_linear(link.edfa_noise_figure_db) / 2.0;
  const double psd = (gain - 1.0) * kPlanck * link.carrier_frequency_hz() * n_sp;
  const double noise_per_pol = link.num_spans * psd * wdm.symbol_rate_hz;
  const double signal_per_pol = dbm_to_watt(link.launch_power_dbm) / 2.0;
  return 10.0 * std::log10(signal_per_pol / noise_per_pol);
}

}  // namespace ccsim::channel
