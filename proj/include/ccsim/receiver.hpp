#pragma once

#include <complex>

#include <Eigen/Dense>

#include "ccsim/channel.hpp"

// Coherent receiver for the center WDM channel: matched filter, exact
// chromatic-dispersion inversion, ideal decimation, genie phase/scale
// removal and effective-SNR estimation.

namespace ccsim::receiver {

struct ReceiverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SymbolStreams {
  Eigen::ArrayXcd x, y;
};

// After RX DSP, with the genie coefficients that were applied.
struct EqualizedSymbols {
  Eigen::ArrayXcd y_x, y_y;
  std::complex<double> h_x{1.0, 0.0}, h_y{1.0, 0.0};
};

// Matched RRC filter, full CD compensation over num_spans * span_length,
// decimation at the known timing phase, guard stripped.
SymbolStreams rx_frontend(const channel::OpticalField& field, const channel::WdmConfig& wdm,
                          const channel::FiberLinkConfig& link, long payload_symbols,
                          int guard_symbols = channel::kCyclicGuardSymbols);

// Least-squares complex scalar aligning y to x on mean-removed sequences:
// h = <conj(y) x> / <|y|^2>. One h per polarization per run.
std::complex<double> estimate_h(const Eigen::ArrayXcd& y, const Eigen::ArrayXcd& x);

// Residual variance var(h y - x) over mean-removed residuals.
double residual_variance(const Eigen::ArrayXcd& y, const Eigen::ArrayXcd& x, std::complex<double> h);

// 10 log10(1 / var(h y - x)). +infinity when the residual is exactly zero.
double effective_snr_db(const Eigen::ArrayXcd& y, const Eigen::ArrayXcd& x, std::complex<double> h);

// Dual-polarization effective SNR: per-pol least-squares h, residual
// variances averaged over the two polarizations.
double effective_snr_db(const SymbolStreams& rx, const Eigen::ArrayXcd& tx_x,
                        const Eigen::ArrayXcd& tx_y);

// Full genie equalization of a received field against the transmitted frame.
EqualizedSymbols equalize(const channel::OpticalField& field, const channel::WdmConfig& wdm,
                          const channel::FiberLinkConfig& link, const Eigen::ArrayXcd& tx_x,
                          const Eigen::ArrayXcd& tx_y, int guard_symbols = channel::kCyclicGuardSymbols);

}  // namespace ccsim::receiver
