#include "ccsim/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ccsim::shaping {

namespace {

// The codec realizes arithmetic-coding interval subdivision in exact integer
// form. Splitting [0,1) at every step proportionally to the remaining counts
// (sub-intervals ordered by ascending amplitude index) partitions the unit
// interval into M = num_sequences(c) cells of equal width 1/M, ordered
// lexicographically. The code point of a k-bit input b is b/2^k, so encoding
// is cell lookup J = floor(b*M/2^k) followed by multiset unranking, and
// decoding is ranking followed by recovering the unique integer in the cell
// [J*2^k/M, (J+1)*2^k/M), which holds at most one integer since 2^k <= M.

struct UnrankState {
  std::vector<int> remaining;
  int total;
  BigInt count;  // number of sequences over the remaining multiset
};

UnrankState start_state(const Composition& c) {
  return {c.counts, c.block_length(), num_sequences(c)};
}

// Number of remaining sequences that continue with amplitude i. Exact:
// count * remaining_i is always divisible by total.
BigInt continuations(const UnrankState& s, std::size_t i) {
  return s.count * s.remaining[i] / s.total;
}

void advance(UnrankState& s, std::size_t i, const BigInt& cnt) {
  s.count = cnt;
  --s.remaining[i];
  --s.total;
}

}  // namespace

double AmplitudeAlphabet::entropy_bits() const {
  double h = 0.0;
  for (double p : target_pmf) h -= p * std::log2(p);
  return h;
}

void AmplitudeAlphabet::validate() const {
  if (amplitudes.empty()) throw ShapingError("alphabet: no amplitudes");
  if (amplitudes.size() != target_pmf.size())
    throw ShapingError("alphabet: amplitudes and target_pmf differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (amplitudes[i] <= 0.0) throw ShapingError("alphabet: amplitudes must be positive");
    if (i > 0 && amplitudes[i] <= amplitudes[i - 1])
      throw ShapingError("alphabet: amplitudes must be strictly increasing");
    if (target_pmf[i] <= 0.0 || target_pmf[i] > 1.0)
      throw ShapingError("alphabet: pmf entries must lie in (0,1]");
    sum += target_pmf[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ShapingError("alphabet: pmf must sum to 1");
}

int Composition::block_length() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

void Composition::validate() const {
  if (counts.empty()) throw ShapingError("composition: empty");
  for (int c : counts)
    if (c < 0) throw ShapingError("composition: negative count");
  if (block_length() <= 0) throw ShapingError("composition: block length must be positive");
}

Composition composition_from_pmf(const AmplitudeAlphabet& alphabet, int n) {
  alphabet.validate();
  if (n <= 0) throw ShapingError("composition_from_pmf: n must be positive");
  if (n < static_cast<int>(alphabet.arity()))
    throw ShapingError("composition_from_pmf: n smaller than alphabet arity");

  const std::size_t m = alphabet.arity();
  std::vector<int> counts(m);
  std::vector<double> remainder(m);
  int assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double exact = n * alphabet.target_pmf[i];
    counts[i] = static_cast<int>(std::floor(exact));
    remainder[i] = exact - counts[i];
    assigned += counts[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return alphabet.target_pmf[a] > alphabet.target_pmf[b];
  });
  for (int left = n - assigned, j = 0; left > 0; --left, ++j) ++counts[order[j]];

  Composition c{std::move(counts)};
  c.validate();
  return c;
}

BigInt num_sequences(const Composition& c) {
  c.validate();
  // Product of binomials keeps intermediates small: choose slots for each
  // amplitude out of what is left.
  BigInt result = 1;
  int remaining = c.block_length();
  for (int count : c.counts) {
    for (int t = 1; t <= count; ++t) {
      result *= remaining - count + t;
      result /= t;
    }
    remaining -= count;
  }
  return result;
}

int input_bit_length(const Composition& c) {
  const BigInt m = num_sequences(c);
  return static_cast<int>(boost::multiprecision::msb(m));  // floor(log2), msb(1) == 0
}

AmplitudeSequence ccdm_encode(const BitVector& data_bits, const Composition& c) {
  const int k = input_bit_length(c);
  if (static_cast<int>(data_bits.size()) != k)
    throw ShapingError("ccdm_encode: expected exactly " + std::to_string(k) + " data bits, got " +
                       std::to_string(data_bits.size()));
  BigInt value = 0;
  for (std::uint8_t bit : data_bits) {
    if (bit > 1) throw ShapingError("ccdm_encode: bits must be 0 or 1");
    value <<= 1;
    value |= bit;
  }
  return ccdm_encode_integer(value, c);
}

AmplitudeSequence ccdm_encode_integer(const BigInt& value, const Composition& c) {
  const int k = input_bit_length(c);
  if (value < 0 || (value >> k) != 0)
    throw ShapingError("ccdm_encode: input value out of range for k=" + std::to_string(k));

  UnrankState s = start_state(c);
  BigInt index = (value * s.count) >> k;  // cell of the code point value/2^k

  AmplitudeSequence seq;
  seq.symbols.reserve(s.total);
  const std::size_t m = c.counts.size();
  for (int step = s.total; step > 0; --step) {
    for (std::size_t i = 0; i < m; ++i) {
      if (s.remaining[i] == 0) continue;
      BigInt cnt = continuations(s, i);
      if (index < cnt) {
        seq.symbols.push_back(static_cast<std::uint8_t>(i));
        advance(s, i, cnt);
        break;
      }
      index -= cnt;
    }
  }
  return seq;
}

BigInt ccdm_decode_integer(const AmplitudeSequence& seq, const Composition& c) {
  c.validate();
  const std::size_t m = c.counts.size();
  std::vector<int> histogram(m, 0);
  for (std::uint8_t sym : seq.symbols) {
    if (sym >= m) throw ShapingError("ccdm_decode: symbol index out of alphabet range");
    ++histogram[sym];
  }
  if (histogram != c.counts)
    throw CompositionMismatchError("ccdm_decode: sequence composition differs from the agreed one");

  UnrankState s = start_state(c);
  const BigInt total_sequences = s.count;
  const int k = static_cast<int>(boost::multiprecision::msb(total_sequences));

  BigInt rank = 0;
  for (std::uint8_t sym : seq.symbols) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(sym); ++i) {
      if (s.remaining[i] == 0) continue;
      rank += continuations(s, i);
    }
    const BigInt cnt = continuations(s, sym);
    advance(s, sym, cnt);
  }

  // Smallest integer b with b/2^k inside the cell [rank/M, (rank+1)/M).
  const BigInt value = (rank << k) / total_sequences + (((rank << k) % total_sequences) != 0 ? 1 : 0);
  if (value * total_sequences >= ((rank + 1) << k))
    throw NonCodewordError("ccdm_decode: sequence is outside the encoder image");
  return value;
}

BitVector ccdm_decode(const AmplitudeSequence& seq, const Composition& c) {
  const BigInt value = ccdm_decode_integer(seq, c);
  const int k = input_bit_length(c);
  BitVector bits(k);
  for (int i = 0; i < k; ++i)
    bits[k - 1 - i] = static_cast<std::uint8_t>(boost::multiprecision::bit_test(value, i) ? 1 : 0);
  return bits;
}

double rate_loss(const Composition& c, const AmplitudeAlphabet& alphabet) {
  alphabet.validate();
  if (alphabet.arity() != c.arity())
    throw ShapingError("rate_loss: composition and alphabet arity differ");
  const double k = static_cast<double>(input_bit_length(c));
  return alphabet.entropy_bits() - k / c.block_length();
}

}  // namespace ccsim::shaping
