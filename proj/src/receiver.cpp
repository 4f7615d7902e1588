#include "ccsim/receiver.hpp"

#include <cmath>
#include <limits>

#include "ccsim/fft.hpp"

namespace ccsim::receiver {

SymbolStreams rx_frontend(const channel::OpticalField& field, const channel::WdmConfig& wdm,
                          const channel::FiberLinkConfig& link, long payload_symbols,
                          int guard_symbols) {
  wdm.validate();
  link.validate();
  const long n = field.size();
  const int os = wdm.oversampling;
  if (n != (payload_symbols + guard_symbols) * os)
    throw ReceiverError("rx_frontend: field length does not match payload + guard");

  const Fft fft(n);
  // Matched filter and exact inverse of the accumulated dispersion, in one
  // spectral operator. Span loss is already undone by the gain-matched EDFAs.
  const double total_m = link.num_spans * link.span_length_km * 1000.0;
  channel::FiberLinkConfig lossless = link;
  lossless.alpha_db_per_km = 0.0;
  Eigen::ArrayXcd h = channel::analytic_linear_response(n, field.sample_rate_hz, lossless, total_m)
                          .conjugate();
  h *= (channel::rrc_spectrum(n, os, wdm.rolloff) / static_cast<double>(n))
           .cast<std::complex<double>>();

  SymbolStreams out;
  for (int pol = 0; pol < 2; ++pol) {
    Eigen::ArrayXcd work = pol == 0 ? field.x : field.y;
    fft.forward_inplace(work);
    work *= h;
    fft.backward_inplace(work);
    Eigen::ArrayXcd& syms = pol == 0 ? out.x : out.y;
    syms.resize(payload_symbols);
    for (long k = 0; k < payload_symbols; ++k) syms[k] = work[k * os];
  }
  return out;
}

std::complex<double> estimate_h(const Eigen::ArrayXcd& y, const Eigen::ArrayXcd& x) {
  if (y.size() != x.size() || y.size() == 0)
    throw ReceiverError("estimate_h: streams must be non-empty and equal length");
  const std::complex<double> my = y.mean();
  const std::complex<double> mx = x.mean();
  const Eigen::ArrayXcd yc = y - my;
  const double denom = yc.abs2().sum();
  if (denom <= 0.0) throw ReceiverError("estimate_h: zero-energy received stream");
  const std::complex<double> num = (yc.conjugate() * (x - mx)).sum();
  return num / denom;
}

double residual_variance(const Eigen::ArrayXcd& y, const Eigen::ArrayXcd& x, std::complex<double> h) {
  if (y.size() != x.size() || y.size() == 0)
    throw ReceiverError("residual_variance: streams must be non-empty and equal length");
  const Eigen::ArrayXcd e = h * y - x;
  return (e - e.mean()).abs2().mean();
}

double effective_snr_db(const Eigen::ArrayXcd& y, const Eigen::ArrayXcd& x, std::complex<double> h) {
  const double v = residual_variance(y, x, h);
  if (v <= 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(v);
}

double effective_snr_db(const SymbolStreams& rx, const Eigen::ArrayXcd& tx_x,
                        const Eigen::ArrayXcd& tx_y) {
  const double vx = residual_variance(rx.x, tx_x, estimate_h(rx.x, tx_x));
  const double vy = residual_variance(rx.y, tx_y, estimate_h(rx.y, tx_y));
  const double v = 0.5 * (vx + vy);
  if (v <= 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(v);
}

EqualizedSymbols equalize(const channel::OpticalField& field, const channel::WdmConfig& wdm,
                          const channel::FiberLinkConfig& link, const Eigen::ArrayXcd& tx_x,
                          const Eigen::ArrayXcd& tx_y, int guard_symbols) {
  const SymbolStreams rx = rx_frontend(field, wdm, link, tx_x.size(), guard_symbols);
  EqualizedSymbols out;
  out.h_x = estimate_h(rx.x, tx_x);
  out.h_y = estimate_h(rx.y, tx_y);
  out.y_x = rx.x;
  out.y_y = rx.y;
  return out;
}

}  // namespace ccsim::receiver
