#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

// Constant-composition distribution matching: compositions, exact sequence
// counting, the fixed-length bits<->amplitudes codec, and rate-loss analytics.

namespace ccsim::shaping {

using BigInt = boost::multiprecision::cpp_int;

struct ShapingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Decoder input whose histogram does not equal the agreed composition.
struct CompositionMismatchError : ShapingError {
  using ShapingError::ShapingError;
};

// Valid-composition sequence that no input bit vector maps to. Only 2^k of
// the multinomially many sequences are codewords.
struct NonCodewordError : ShapingError {
  using ShapingError::ShapingError;
};

// One-sided shaped ASK alphabet: strictly increasing positive amplitude
// levels and their target probabilities (same order).
struct AmplitudeAlphabet {
  std::vector<double> amplitudes;
  std::vector<double> target_pmf;

  std::size_t arity() const { return amplitudes.size(); }
  double entropy_bits() const;
  void validate() const;  // throws ShapingError on any invariant violation
};

// Occurrence count of each alphabet amplitude in one DM block.
struct Composition {
  std::vector<int> counts;

  int block_length() const;  // n = sum of counts
  std::size_t arity() const { return counts.size(); }
  void validate() const;
};

// Ordered amplitude indices (0-based into the alphabet) emitted by one or
// more DM blocks.
struct AmplitudeSequence {
  std::vector<std::uint8_t> symbols;

  std::size_t size() const { return symbols.size(); }
};

using BitVector = std::vector<std::uint8_t>;  // one bit per element, MSB first

// Largest-remainder apportionment of n slots to the target PMF. Ties go to
// the higher-probability amplitude. Exact when every n*p_i is an integer.
Composition composition_from_pmf(const AmplitudeAlphabet& alphabet, int n);

// n! / prod(counts_i!), exact.
BigInt num_sequences(const Composition& c);

// k = floor(log2(num_sequences(c))).
int input_bit_length(const Composition& c);

// Fixed-length encode: k data bits -> one block of n amplitude indices with
// composition exactly c. Injective over all 2^k inputs.
AmplitudeSequence ccdm_encode(const BitVector& data_bits, const Composition& c);

// Same map with the input bits packed into an integer < 2^k.
AmplitudeSequence ccdm_encode_integer(const BigInt& value, const Composition& c);

// Inverse of ccdm_encode. Throws CompositionMismatchError when the sequence
// histogram differs from c, NonCodewordError when the sequence is reachable
// by no input.
BitVector ccdm_decode(const AmplitudeSequence& seq, const Composition& c);

BigInt ccdm_decode_integer(const AmplitudeSequence& seq, const Composition& c);

// H(target_pmf) - k/n in bits per amplitude.
double rate_loss(const Composition& c, const AmplitudeAlphabet& alphabet);

}  // namespace ccsim::shaping
