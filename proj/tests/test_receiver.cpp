#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "ccsim/receiver.hpp"
#include "ccsim/rng.hpp"

using namespace ccsim;
using namespace ccsim::receiver;

namespace {

const shaping::AmplitudeAlphabet kShaped{{1, 3, 5, 7}, {0.4, 0.3, 0.2, 0.1}};

Eigen::ArrayXcd random_symbols(long n, std::uint64_t seed) {
  const auto constellation = mapping::make_constellation(kShaped);
  StreamRng rng(seed);
  Eigen::ArrayXcd out(n);
  for (long i = 0; i < n; ++i) out[i] = constellation.point(static_cast<int>(rng.below(64)));
  return out;
}

Eigen::ArrayXcd awgn(const Eigen::ArrayXcd& x, double variance, std::uint64_t seed) {
  StreamRng rng(seed);
  Eigen::ArrayXcd out(x.size());
  const double s = std::sqrt(variance / 2.0);
  for (long i = 0; i < x.size(); ++i)
    out[i] = x[i] + std::complex<double>(s * rng.gaussian(), s * rng.gaussian());
  return out;
}

}  // namespace

TEST_CASE("estimate_h recovers scalar channels exactly") {
  const auto x = random_symbols(5000, 1);
  CHECK(std::abs(estimate_h(x, x) - std::complex<double>(1.0, 0.0)) < 1e-12);

  const std::complex<double> c = std::polar(0.5, 3.141592653589793 / 4.0);
  const Eigen::ArrayXcd y = x * c;
  const std::complex<double> h = estimate_h(y, x);
  CHECK(std::abs(h - 1.0 / c) < 1e-12);

  CHECK_THROWS_AS(estimate_h(Eigen::ArrayXcd::Zero(100), x.head(100)), ReceiverError);
}

TEST_CASE("regression attenuation: noise shrinks |h|") {
  const auto x = random_symbols(20000, 2);
  const Eigen::ArrayXcd clean = 2.0 * x;
  const Eigen::ArrayXcd noisy = awgn(clean, 1.0, 3);
  CHECK(std::abs(estimate_h(noisy, x)) < std::abs(estimate_h(clean, x)));
}

TEST_CASE("effective SNR: plug-in value and infinity flag") {
  const auto x = random_symbols(100000, 4);
  CHECK(effective_snr_db(x, x, {1.0, 0.0}) == std::numeric_limits<double>::infinity());

  const Eigen::ArrayXcd y = awgn(x, 0.01, 5);
  const std::complex<double> h = estimate_h(y, x);
  CHECK(effective_snr_db(y, x, h) == doctest::Approx(20.0).epsilon(0.005));
}

TEST_CASE("effective SNR is invariant to global phase and positive scaling") {
  const auto x = random_symbols(5000, 6);
  const Eigen::ArrayXcd y = awgn(x, 0.02, 7);
  const double base = effective_snr_db(y, x, estimate_h(y, x));
  const Eigen::ArrayXcd rotated = y * std::polar(3.7, 1.234);
  const double after = effective_snr_db(rotated, x, estimate_h(rotated, x));
  CHECK(after == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("the SNR estimator is unbiased on synthetic AWGN") {
  double sum = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto x = random_symbols(20000, 100 + t);
    const Eigen::ArrayXcd y = awgn(x, 0.01, 200 + t);
    sum += effective_snr_db(y, x, estimate_h(y, x));
  }
  CHECK(sum / trials == doctest::Approx(20.0).epsilon(0.0025));  // within 0.05 dB
}

TEST_CASE("after h the aggregate cross-correlation has no residual rotation") {
  const auto x = random_symbols(50000, 8);
  Eigen::ArrayXcd y = awgn(x * std::polar(2.0, 0.7), 0.05, 9);
  const std::complex<double> h = estimate_h(y, x);
  const std::complex<double> cross = ((h * y).conjugate() * x).sum();
  CHECK(std::abs(std::arg(cross)) < 1e-3);
}

TEST_CASE("dual-pol SNR pools the residual variances") {
  const auto x1 = random_symbols(30000, 10);
  const auto x2 = random_symbols(30000, 11);
  SymbolStreams rx{awgn(x1, 0.01, 12), awgn(x2, 0.02, 13)};
  const double snr = effective_snr_db(rx, x1, x2);
  CHECK(snr == doctest::Approx(-10.0 * std::log10(0.015)).epsilon(0.01));
}

TEST_CASE("dispersion is inverted exactly on a noiseless link") {
  mapping::FrameParams params;
  params.alphabet = kShaped;
  params.block_length_n = 100;
  params.total_symbols = 4096;
  params.fec_block_len = 4096;
  const auto frame = mapping::build_frame(params, 21);

  channel::WdmConfig wdm;
  channel::FiberLinkConfig link;
  link.alpha_db_per_km = 0.0;  // unit-gain EDFAs stay noiseless
  link.gamma_per_w_km = 0.0;
  link.num_spans = 3;

  channel::OpticalField field = channel::rrc_shape(frame, wdm, -0.5, 512);
  StreamRng rng(22);
  channel::propagate_link(field, link, rng);
  const auto eq = equalize(field, wdm, link, frame.symbols_x, frame.symbols_y, 512);
  CHECK((eq.h_x * eq.y_x - frame.symbols_x).abs().maxCoeff() < 1e-6);
  CHECK((eq.h_y * eq.y_y - frame.symbols_y).abs().maxCoeff() < 1e-6);
}

TEST_CASE("matched filtering leaves the symbol-rate noise white") {
  mapping::FrameParams params;
  params.alphabet = kShaped;
  params.block_length_n = 100;
  params.total_symbols = 21600;
  params.fec_block_len = 21600;
  const auto frame = mapping::build_frame(params, 23);

  channel::WdmConfig wdm;
  channel::FiberLinkConfig link;
  link.gamma_per_w_km = 0.0;

  channel::OpticalField field = channel::rrc_shape(frame, wdm, -0.5, 512);
  StreamRng rng(24);
  channel::propagate_link(field, link, rng);
  const auto rx = rx_frontend(field, wdm, link, 21600, 512);
  const std::complex<double> h = estimate_h(rx.x, frame.symbols_x);
  const Eigen::ArrayXcd e = h * rx.x - frame.symbols_x;

  const long n = e.size();
  const double p = e.abs2().mean();
  for (int lag = 1; lag <= 3; ++lag) {
    const std::complex<double> acf =
        (e.tail(n - lag).conjugate() * e.head(n - lag)).sum() / static_cast<double>(n - lag);
    CHECK(std::abs(acf) / p < 3.0 / std::sqrt(static_cast<double>(n)));
  }
}
