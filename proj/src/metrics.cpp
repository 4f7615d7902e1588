#include "ccsim/metrics.hpp"

#include <cmath>
#include <limits>

namespace ccsim::metrics {

namespace {

constexpr double kTol = 1e-9;
constexpr double kTwoPi = 6.283185307179586476925286766559;

long run_count(const Eigen::ArrayXcd& symbols, bool (*differ)(std::complex<double>, std::complex<double>)) {
  long runs = 1;
  for (long i = 1; i < symbols.size(); ++i)
    if (differ(symbols[i - 1], symbols[i])) ++runs;
  return runs;
}

bool differ_value(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) > kTol; }

bool differ_abs(std::complex<double> a, std::complex<double> b) {
  return std::abs(std::abs(a) - std::abs(b)) > kTol;
}

bool differ_arg(std::complex<double> a, std::complex<double> b) {
  double d = std::abs(std::arg(a) - std::arg(b));
  d = std::min(d, kTwoPi - d);  // principal-value wrap
  return d > kTol;
}

double ratio_over(const Eigen::ArrayXcd& symbols,
                  bool (*differ)(std::complex<double>, std::complex<double>)) {
  if (symbols.size() == 0) throw MetricsError("run ratio: empty stream");
  return static_cast<double>(run_count(symbols, differ)) / static_cast<double>(symbols.size());
}

}  // namespace

std::vector<double> empirical_pmf(const Eigen::ArrayXcd& symbols,
                                  const mapping::QamConstellation& constellation) {
  if (symbols.size() == 0) throw MetricsError("empirical_pmf: empty stream");
  std::vector<long> counts(constellation.num_points(), 0);
  for (long i = 0; i < symbols.size(); ++i) {
    const int idx = constellation.index_of(symbols[i]);
    if (idx < 0)
      throw MetricsError("empirical_pmf: symbol " + std::to_string(i) + " is not on the constellation grid");
    ++counts[idx];
  }
  std::vector<double> pmf(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    pmf[i] = static_cast<double>(counts[i]) / static_cast<double>(symbols.size());
  return pmf;
}

double kl_divergence_pmf(const std::vector<double>& expected, const std::vector<double>& empirical) {
  if (expected.size() != empirical.size())
    throw MetricsError("kl_divergence: PMF sizes differ");
  double kl = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    if (empirical[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += expected[i] * std::log2(expected[i] / empirical[i]);
  }
  return kl;
}

double kl_divergence(const std::vector<double>& expected, const Eigen::ArrayXcd& symbols,
                     const mapping::QamConstellation& constellation) {
  return kl_divergence_pmf(expected, empirical_pmf(symbols, constellation));
}

double kurtosis_2d(const Eigen::ArrayXcd& symbols) {
  if (symbols.size() < 2) throw MetricsError("kurtosis_2d: need at least two symbols");
  const std::complex<double> mu = symbols.mean();
  const Eigen::ArrayXd dev2 = (symbols - mu).abs2();
  const double m2 = dev2.mean();
  if (m2 <= 0.0) throw MetricsError("kurtosis_2d: constant stream has undefined kurtosis");
  const double m4 = dev2.square().mean();
  return m4 / (m2 * m2);
}

double run_ratio(const Eigen::ArrayXcd& symbols) { return ratio_over(symbols, differ_value); }

double run_ratio_abs(const Eigen::ArrayXcd& symbols) { return ratio_over(symbols, differ_abs); }

double run_ratio_arg(const Eigen::ArrayXcd& symbols) {
  for (long i = 0; i < symbols.size(); ++i)
    if (symbols[i] == std::complex<double>(0.0, 0.0))
      throw MetricsError("run_ratio_arg: zero symbol has undefined phase");
  return ratio_over(symbols, differ_arg);
}

MetricsReport analyze_frame(const mapping::QamFrame& frame,
                            const mapping::QamConstellation& constellation) {
  const long n = frame.size();
  if (n == 0 || frame.symbols_y.size() != n)
    throw MetricsError("analyze_frame: malformed frame");

  Eigen::ArrayXcd pooled(2 * n);
  pooled << frame.symbols_x, frame.symbols_y;

  MetricsReport r;
  r.kl_bits = kl_divergence(constellation.expected_pmf, pooled, constellation);
  r.kurtosis_2d = kurtosis_2d(pooled);
  r.run_ratio = 0.5 * (run_ratio(frame.symbols_x) + run_ratio(frame.symbols_y));
  r.run_ratio_abs = 0.5 * (run_ratio_abs(frame.symbols_x) + run_ratio_abs(frame.symbols_y));
  r.run_ratio_arg = 0.5 * (run_ratio_arg(frame.symbols_x) + run_ratio_arg(frame.symbols_y));
  r.n_sim = n;
  r.block_length_n = frame.block_length_n;
  r.pairing = frame.pairing;
  r.interleaved = frame.interleaved;
  return r;
}

}  // namespace ccsim::metrics
