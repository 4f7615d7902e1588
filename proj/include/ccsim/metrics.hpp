#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ccsim/mapping.hpp"

// Sequence statistics: empirical PMF, KL divergence against the expected QAM
// distribution, 2D kurtosis, and the three run ratios.

namespace ccsim::metrics {

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-run record. Run ratios live in [1/n_sim, 1]; kl_bits is +infinity when
// an expected point never occurs in the sample.
struct MetricsReport {
  double kl_bits = 0.0;
  double kurtosis_2d = 0.0;
  double run_ratio = 0.0;
  double run_ratio_abs = 0.0;
  double run_ratio_arg = 0.0;
  long n_sim = 0;

  // sweep coordinates
  int block_length_n = 0;
  mapping::Pairing pairing = mapping::Pairing::intra;
  bool interleaved = false;
};

// Frequency of each constellation point over the stream. Pre-channel use
// only: every symbol must sit on the grid within 1e-9 (unscaled units).
std::vector<double> empirical_pmf(const Eigen::ArrayXcd& symbols,
                                  const mapping::QamConstellation& constellation);

// sum_x P(x) log2(P(x)/Q(x)) with P the expected PMF and Q the empirical one
// estimated from the stream. Returns +infinity when some Q(x)=0 < P(x).
double kl_divergence(const std::vector<double>& expected, const Eigen::ArrayXcd& symbols,
                     const mapping::QamConstellation& constellation);

// Same, from an already-computed empirical PMF.
double kl_divergence_pmf(const std::vector<double>& expected, const std::vector<double>& empirical);

// E|X-mu|^4 / (E|X-mu|^2)^2 with mu the complex sample mean.
double kurtosis_2d(const Eigen::ArrayXcd& symbols);

// Number of maximal runs of identical values divided by the stream length.
double run_ratio(const Eigen::ArrayXcd& symbols);

// Run ratio with equality on |x| (tolerance 1e-9).
double run_ratio_abs(const Eigen::ArrayXcd& symbols);

// Run ratio with equality on arg(x) (tolerance 1e-9 rad); rejects zeros.
double run_ratio_arg(const Eigen::ArrayXcd& symbols);

// All metrics of a frame: KL and kurtosis over the pooled dual-pol stream,
// run ratios computed per polarization and averaged.
MetricsReport analyze_frame(const mapping::QamFrame& frame,
                            const mapping::QamConstellation& constellation);

}  // namespace ccsim::metrics
