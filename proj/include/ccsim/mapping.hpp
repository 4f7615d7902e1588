#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccsim/shaping.hpp"

// Dual-polarization shaped-QAM symbol streams from amplitude sequences:
// pairing strategies, sign-bit application, constellation normalization and
// the per-FEC-block interleaver.

namespace ccsim::mapping {

struct MappingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Pairing { intra, inter };

const char* to_string(Pairing p);
Pairing pairing_from_string(const std::string& s);

// Square QAM grid {±a_i ± j·a_q} over the one-sided alphabet, scaled to unit
// average energy under the target PMF (not the per-frame empirical one, so
// short-block frames may sit slightly off unit energy).
//
// Axis levels are indexed ascending: [-a_{m-1},...,-a_0, a_0,...,a_{m-1}],
// and point index = level_i * 2m + level_q (I major).
struct QamConstellation {
  std::vector<double> amplitudes;   // one-sided levels, ascending
  double scale = 1.0;               // applied to the integer grid
  std::vector<double> expected_pmf; // per point, sums to 1

  int arity() const { return static_cast<int>(amplitudes.size()); }
  int levels_per_axis() const { return 2 * arity(); }
  int num_points() const { return levels_per_axis() * levels_per_axis(); }

  double level(int l) const {
    const int m = arity();
    return l < m ? -amplitudes[m - 1 - l] : amplitudes[l - m];
  }
  std::complex<double> point(int index) const {
    const int lpa = levels_per_axis();
    return scale * std::complex<double>(level(index / lpa), level(index % lpa));
  }
  // Index of the nearest grid point, or -1 if the symbol is farther than tol
  // from the grid (tolerance in unscaled grid units).
  int index_of(std::complex<double> symbol, double tol = 1e-9) const;
};

QamConstellation make_constellation(const shaping::AmplitudeAlphabet& alphabet);

// PMF over the constellation points implied by the one-sided amplitude PMF
// and uniform signs (Cartesian product per quadrant, divided across the four
// quadrants). Indexed like QamConstellation points.
std::vector<double> expected_qam_pmf(const shaping::AmplitudeAlphabet& alphabet);

// m x m matrix over (|I|, |Q|) amplitude-index pairs, normalized to sum 1.
// For the expected PMF this is exactly the per-quadrant matrix; for an
// empirical PMF it pools the four quadrants.
std::vector<double> abs_pair_pmf(const std::vector<double>& point_pmf, int arity);

// (a_I, a_Q) amplitude-index pairs forming QAM payloads.
struct PairedAmplitudes {
  std::vector<std::pair<std::uint8_t, std::uint8_t>> pairs;
};

// Adjacent amplitudes of one stream: pair i = (seq[2i], seq[2i+1]).
PairedAmplitudes pair_intra(const shaping::AmplitudeSequence& seq);

// One amplitude from each of two stacked streams: pair i = (a[i], b[i]).
PairedAmplitudes pair_inter(const shaping::AmplitudeSequence& a, const shaping::AmplitudeSequence& b);

// Applies quadrant sign bits ({0 -> +1, 1 -> -1}, I bit before Q bit, two
// bits per pair) and the constellation scaling.
Eigen::ArrayXcd map_pas(const PairedAmplitudes& pairs, const shaping::BitVector& sign_bits,
                        const QamConstellation& constellation);

// Dual-polarization symbol streams plus the metadata needed to reproduce and
// analyze them.
struct QamFrame {
  Eigen::ArrayXcd symbols_x, symbols_y;
  int block_length_n = 0;
  Pairing pairing = Pairing::intra;
  bool interleaved = false;
  int fec_block_len = 10800;
  std::uint64_t seed = 0;              // frame master seed
  std::uint64_t interleaver_seed = 0;  // meaningful when interleaved
  long dm_blocks_per_pol = 0;

  long size() const { return static_cast<long>(symbols_x.size()); }
};

// Independent uniform permutation of the symbols within each FEC block,
// derived deterministically from (seed, block index, polarization).
QamFrame interleave(const QamFrame& frame, std::uint64_t seed);
QamFrame deinterleave(const QamFrame& frame, std::uint64_t seed);

struct FrameParams {
  shaping::AmplitudeAlphabet alphabet;
  int block_length_n = 10;
  Pairing pairing = Pairing::intra;
  long total_symbols = 10800;  // per polarization
  bool interleave = false;
  int fec_block_len = 10800;
};

// Encodes enough independent random-data DM blocks per polarization, pairs,
// maps and optionally interleaves. Deterministic given (params, seed).
QamFrame build_frame(const FrameParams& params, std::uint64_t seed);

}  // namespace ccsim::mapping
