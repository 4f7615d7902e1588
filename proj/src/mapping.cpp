#include "ccsim/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccsim/rng.hpp"

namespace ccsim::mapping {

namespace {

constexpr std::uint64_t kTagDataBits = 0x64617461;
constexpr std::uint64_t kTagSignBits = 0x7369676e;
constexpr std::uint64_t kTagInterleaver = 0x696c7665;

shaping::BigInt random_bits(StreamRng& rng, int k) {
  shaping::BigInt v = 0;
  for (int got = 0; got < k; got += 64) {
    v <<= 64;
    v |= rng.u64();
  }
  if (k == 0) return 0;
  v &= (shaping::BigInt(1) << k) - 1;
  return v;
}

// Uniform permutation of [0, len) via Fisher-Yates.
std::vector<std::uint32_t> block_permutation(int len, std::uint64_t seed) {
  StreamRng rng(seed);
  std::vector<std::uint32_t> perm(len);
  std::iota(perm.begin(), perm.end(), 0u);
  for (int i = len - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

enum class Direction { forward, inverse };

QamFrame permute_frame(const QamFrame& frame, std::uint64_t seed, Direction dir) {
  const long len = frame.size();
  if (frame.fec_block_len <= 0) throw MappingError("interleave: fec_block_len must be positive");
  if (len % frame.fec_block_len != 0)
    throw MappingError("interleave: stream length is not a multiple of the FEC block length");

  QamFrame out = frame;
  const int block = frame.fec_block_len;
  const long num_blocks = len / block;
  for (int pol = 0; pol < 2; ++pol) {
    const Eigen::ArrayXcd& src = pol == 0 ? frame.symbols_x : frame.symbols_y;
    Eigen::ArrayXcd& dst = pol == 0 ? out.symbols_x : out.symbols_y;
    for (long b = 0; b < num_blocks; ++b) {
      const auto perm = block_permutation(block, mix_seed(seed, static_cast<std::uint64_t>(b), pol));
      const long base = b * block;
      for (int t = 0; t < block; ++t) {
        if (dir == Direction::forward)
          dst[base + t] = src[base + perm[t]];
        else
          dst[base + perm[t]] = src[base + t];
      }
    }
  }
  return out;
}

}  // namespace

const char* to_string(Pairing p) { return p == Pairing::intra ? "intra" : "inter"; }

Pairing pairing_from_string(const std::string& s) {
  if (s == "intra") return Pairing::intra;
  if (s == "inter") return Pairing::inter;
  throw MappingError("unknown pairing mode '" + s + "' (expected intra or inter)");
}

int QamConstellation::index_of(std::complex<double> symbol, double tol) const {
  const std::complex<double> u = symbol / scale;
  const int m = arity();
  auto axis_index = [&](double v) {
    const double mag = std::abs(v);
    int best = -1;
    double best_err = tol;
    for (int i = 0; i < m; ++i) {
      const double err = std::abs(mag - amplitudes[i]);
      if (err <= best_err) {
        best_err = err;
        best = i;
      }
    }
    if (best < 0) return -1;
    return v < 0 ? m - 1 - best : m + best;
  };
  const int li = axis_index(u.real());
  const int lq = axis_index(u.imag());
  if (li < 0 || lq < 0) return -1;
  return li * levels_per_axis() + lq;
}

QamConstellation make_constellation(const shaping::AmplitudeAlphabet& alphabet) {
  alphabet.validate();
  QamConstellation c;
  c.amplitudes = alphabet.amplitudes;
  c.expected_pmf = expected_qam_pmf(alphabet);

  double energy = 0.0;  // mean |point|^2 on the integer grid under the target PMF
  for (int idx = 0; idx < c.num_points(); ++idx) {
    const int lpa = c.levels_per_axis();
    const double re = c.level(idx / lpa);
    const double im = c.level(idx % lpa);
    energy += c.expected_pmf[idx] * (re * re + im * im);
  }
  c.scale = 1.0 / std::sqrt(energy);
  return c;
}

std::vector<double> expected_qam_pmf(const shaping::AmplitudeAlphabet& alphabet) {
  alphabet.validate();
  const int m = static_cast<int>(alphabet.arity());
  const int lpa = 2 * m;
  std::vector<double> pmf(static_cast<std::size_t>(lpa) * lpa);
  auto level_prob = [&](int l) {
    const int one_sided = l < m ? m - 1 - l : l - m;
    return alphabet.target_pmf[one_sided] / 2.0;  // uniform signs
  };
  for (int li = 0; li < lpa; ++li)
    for (int lq = 0; lq < lpa; ++lq) pmf[li * lpa + lq] = level_prob(li) * level_prob(lq);
  return pmf;
}

std::vector<double> abs_pair_pmf(const std::vector<double>& point_pmf, int arity) {
  const int lpa = 2 * arity;
  if (static_cast<int>(point_pmf.size()) != lpa * lpa)
    throw MappingError("abs_pair_pmf: PMF size does not match arity");
  std::vector<double> out(static_cast<std::size_t>(arity) * arity, 0.0);
  double total = 0.0;
  for (int li = 0; li < lpa; ++li) {
    const int i = li < arity ? arity - 1 - li : li - arity;
    for (int lq = 0; lq < lpa; ++lq) {
      const int q = lq < arity ? arity - 1 - lq : lq - arity;
      out[i * arity + q] += point_pmf[li * lpa + lq];
      total += point_pmf[li * lpa + lq];
    }
  }
  if (total > 0.0)
    for (double& v : out) v /= total;
  return out;
}

PairedAmplitudes pair_intra(const shaping::AmplitudeSequence& seq) {
  if (seq.size() % 2 != 0) throw MappingError("pair_intra: sequence length must be even");
  PairedAmplitudes out;
  out.pairs.reserve(seq.size() / 2);
  for (std::size_t i = 0; i + 1 < seq.size(); i += 2)
    out.pairs.emplace_back(seq.symbols[i], seq.symbols[i + 1]);
  return out;
}

PairedAmplitudes pair_inter(const shaping::AmplitudeSequence& a, const shaping::AmplitudeSequence& b) {
  if (a.size() != b.size()) throw MappingError("pair_inter: sequence lengths differ");
  PairedAmplitudes out;
  out.pairs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.pairs.emplace_back(a.symbols[i], b.symbols[i]);
  return out;
}

Eigen::ArrayXcd map_pas(const PairedAmplitudes& pairs, const shaping::BitVector& sign_bits,
                        const QamConstellation& constellation) {
  if (sign_bits.size() < 2 * pairs.pairs.size())
    throw MappingError("map_pas: need two sign bits per amplitude pair");
  const auto& amps = constellation.amplitudes;
  Eigen::ArrayXcd out(static_cast<long>(pairs.pairs.size()));
  for (std::size_t i = 0; i < pairs.pairs.size(); ++i) {
    const auto [ai, aq] = pairs.pairs[i];
    if (ai >= amps.size() || aq >= amps.size())
      throw MappingError("map_pas: amplitude index out of range");
    const double si = sign_bits[2 * i] ? -1.0 : 1.0;
    const double sq = sign_bits[2 * i + 1] ? -1.0 : 1.0;
    out[static_cast<long>(i)] =
        constellation.scale * std::complex<double>(si * amps[ai], sq * amps[aq]);
  }
  return out;
}

QamFrame interleave(const QamFrame& frame, std::uint64_t seed) {
  QamFrame out = permute_frame(frame, seed, Direction::forward);
  out.interleaved = true;
  out.interleaver_seed = seed;
  return out;
}

QamFrame deinterleave(const QamFrame& frame, std::uint64_t seed) {
  QamFrame out = permute_frame(frame, seed, Direction::inverse);
  out.interleaved = false;
  out.interleaver_seed = seed;
  return out;
}

QamFrame build_frame(const FrameParams& params, std::uint64_t seed) {
  params.alphabet.validate();
  if (params.total_symbols <= 0) throw MappingError("build_frame: total_symbols must be positive");
  if (params.pairing == Pairing::intra && params.block_length_n % 2 != 0)
    throw MappingError("build_frame: intra pairing requires an even block length");
  if (params.interleave && params.total_symbols % params.fec_block_len != 0)
    throw MappingError("build_frame: interleaving requires a whole number of FEC blocks");

  const auto composition = shaping::composition_from_pmf(params.alphabet, params.block_length_n);
  const int k = shaping::input_bit_length(composition);
  const QamConstellation constellation = make_constellation(params.alphabet);
  const long total = params.total_symbols;
  const int n = params.block_length_n;

  QamFrame frame;
  frame.block_length_n = n;
  frame.pairing = params.pairing;
  frame.fec_block_len = params.fec_block_len;
  frame.seed = seed;

  for (int pol = 0; pol < 2; ++pol) {
    StreamRng data_rng(mix_seed(seed, kTagDataBits, pol));
    StreamRng sign_rng(mix_seed(seed, kTagSignBits, pol));

    PairedAmplitudes pairs;
    pairs.pairs.reserve(total);
    long blocks = 0;
    if (params.pairing == Pairing::intra) {
      const long amps_needed = 2 * total;
      shaping::AmplitudeSequence stream;
      stream.symbols.reserve(((amps_needed + n - 1) / n) * n);
      while (static_cast<long>(stream.size()) < amps_needed) {
        const auto block = shaping::ccdm_encode_integer(random_bits(data_rng, k), composition);
        stream.symbols.insert(stream.symbols.end(), block.symbols.begin(), block.symbols.end());
        ++blocks;
      }
      stream.symbols.resize(amps_needed);
      pairs = pair_intra(stream);
    } else {
      while (static_cast<long>(pairs.pairs.size()) < total) {
        const auto a = shaping::ccdm_encode_integer(random_bits(data_rng, k), composition);
        const auto b = shaping::ccdm_encode_integer(random_bits(data_rng, k), composition);
        blocks += 2;
        const auto chunk = pair_inter(a, b);
        pairs.pairs.insert(pairs.pairs.end(), chunk.pairs.begin(), chunk.pairs.end());
      }
      pairs.pairs.resize(total);
    }

    shaping::BitVector sign_bits(2 * total);
    std::uint64_t word = 0;
    int bits_left = 0;
    for (auto& b : sign_bits) {
      if (bits_left == 0) {
        word = sign_rng.u64();
        bits_left = 64;
      }
      b = static_cast<std::uint8_t>(word & 1u);
      word >>= 1;
      --bits_left;
    }

    (pol == 0 ? frame.symbols_x : frame.symbols_y) = map_pas(pairs, sign_bits, constellation);
    frame.dm_blocks_per_pol = blocks;
  }

  if (params.interleave) frame = interleave(frame, mix_seed(seed, kTagInterleaver));
  return frame;
}

}  // namespace ccsim::mapping
