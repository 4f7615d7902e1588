#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ccsim/rng.hpp"
#include "ccsim/shaping.hpp"

using namespace ccsim;
using namespace ccsim::shaping;

namespace {

const AmplitudeAlphabet kShaped{{1, 3, 5, 7}, {0.4, 0.3, 0.2, 0.1}};

// Independent oracle: all sequences of a composition in lexicographic order,
// via std::next_permutation.
std::vector<std::vector<std::uint8_t>> enumerate_sequences(const Composition& c) {
  std::vector<std::uint8_t> base;
  for (std::size_t i = 0; i < c.counts.size(); ++i)
    base.insert(base.end(), c.counts[i], static_cast<std::uint8_t>(i));
  std::vector<std::vector<std::uint8_t>> all;
  do {
    all.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return all;
}

BitVector bits_of(std::uint64_t value, int k) {
  BitVector bits(k);
  for (int i = 0; i < k; ++i) bits[k - 1 - i] = (value >> i) & 1;
  return bits;
}

BitVector random_bits(StreamRng& rng, int k) {
  BitVector bits(k);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng.u64() & 1);
  return bits;
}

std::vector<int> histogram(const AmplitudeSequence& seq, std::size_t arity) {
  std::vector<int> h(arity, 0);
  for (auto s : seq.symbols) ++h[s];
  return h;
}

}  // namespace

TEST_CASE("composition from pmf matches the worked examples") {
  CHECK(composition_from_pmf(kShaped, 10).counts == std::vector<int>{4, 3, 2, 1});
  CHECK(composition_from_pmf(kShaped, 100).counts == std::vector<int>{40, 30, 20, 10});
  CHECK(composition_from_pmf({{2.0}, {1.0}}, 5).counts == std::vector<int>{5});
}

TEST_CASE("composition rejects bad inputs") {
  CHECK_THROWS_AS(composition_from_pmf(kShaped, 0), ShapingError);
  CHECK_THROWS_AS(composition_from_pmf({{1, 3}, {1.0, 0.0}}, 10), ShapingError);
  CHECK_THROWS_AS(composition_from_pmf(kShaped, 2), ShapingError);  // n below arity
}

TEST_CASE("largest-remainder apportionment stays within one slot of n*p") {
  StreamRng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.below(5);
    std::vector<double> p(m);
    double sum = 0;
    for (auto& v : p) sum += v = -std::log(1.0 - rng.uniform01());
    for (auto& v : p) v /= sum;
    std::vector<double> amps(m);
    for (std::size_t i = 0; i < m; ++i) amps[i] = 1.0 + 2.0 * i;
    const int n = static_cast<int>(m + rng.below(500));
    const auto c = composition_from_pmf({amps, p}, n);
    CHECK(c.block_length() == n);
    for (std::size_t i = 0; i < m; ++i) CHECK(std::abs(c.counts[i] - n * p[i]) < 1.0);
  }
}

TEST_CASE("sequence counts: exact values") {
  CHECK(num_sequences({{4, 3, 2, 1}}) == 12600);
  CHECK(num_sequences({{5}}) == 1);

  // 100! / (40! 30! 20! 10!), exact; rounds to 4.9e52.
  const auto big = num_sequences({{40, 30, 20, 10}});
  CHECK(big.str() == "48843959434089403432573534603965479124799025662819200");
  CHECK(big.str().size() == 53);
}

TEST_CASE("sequence counts agree with exhaustive enumeration") {
  for (const Composition& c : {Composition{{2, 2, 1}}, Composition{{3, 2}}, Composition{{1, 1, 1, 1}}}) {
    CHECK(num_sequences(c) == enumerate_sequences(c).size());
  }
}

TEST_CASE("sequence count is invariant under count permutations") {
  StreamRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> counts(2 + rng.below(4));
    for (auto& v : counts) v = static_cast<int>(rng.below(8));
    counts[0] += 1;  // keep n positive
    auto shuffled = counts;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i)
      std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
    CHECK(num_sequences({counts}) == num_sequences({shuffled}));
  }
}

TEST_CASE("input bit length") {
  CHECK(input_bit_length({{4, 3, 2, 1}}) == 13);  // 2^13 = 8192 <= 12600 < 16384
  CHECK(input_bit_length({{5}}) == 0);
  CHECK(input_bit_length({{1, 1}}) == 1);

  StreamRng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> counts(1 + rng.below(4));
    for (auto& v : counts) v = 1 + static_cast<int>(rng.below(20));
    const Composition c{counts};
    const auto m = num_sequences(c);
    const int k = input_bit_length(c);
    CHECK((BigInt(1) << k) <= m);
    CHECK(m < (BigInt(1) << (k + 1)));
  }
}

TEST_CASE("encode: determinism, conventions, and the constant-composition property") {
  const Composition c{{4, 3, 2, 1}};
  const auto s0 = ccdm_encode(bits_of(0, 13), c);
  CHECK(s0.symbols == ccdm_encode(bits_of(0, 13), c).symbols);

  // Sub-intervals ordered by ascending amplitude: bit 0 encodes [0,1].
  const Composition swap{{1, 1}};
  CHECK(ccdm_encode(bits_of(0, 1), swap).symbols == std::vector<std::uint8_t>{0, 1});
  CHECK(ccdm_encode(bits_of(1, 1), swap).symbols == std::vector<std::uint8_t>{1, 0});

  StreamRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = ccdm_encode(random_bits(rng, 13), c);
    CHECK(seq.symbols.size() == 10);
    CHECK(histogram(seq, 4) == c.counts);
  }

  CHECK_THROWS_AS(ccdm_encode(bits_of(0, 12), c), ShapingError);
}

TEST_CASE("decode inverts encode") {
  StreamRng rng(123);
  for (int n : {10, 100}) {
    const auto c = composition_from_pmf(kShaped, n);
    const int k = input_bit_length(c);
    for (int trial = 0; trial < 300; ++trial) {
      const auto bits = random_bits(rng, k);
      CHECK(ccdm_decode(ccdm_encode(bits, c), c) == bits);
    }
  }
  CHECK(ccdm_decode(AmplitudeSequence{{0, 1}}, Composition{{1, 1}}) == BitVector{0});
}

TEST_CASE("decode rejects composition mismatches distinctly from non-codewords") {
  const Composition c{{4, 3, 2, 1}};
  AmplitudeSequence wrong{{0, 0, 0, 0, 0, 1, 1, 2, 2, 3}};  // histogram [5,2,2,1]
  CHECK_THROWS_AS(ccdm_decode(wrong, c), CompositionMismatchError);

  // [1,0,0] is the lexicographically last sequence of {0,0,1}; its cell
  // [2/3, 1) holds no 1-bit code point.
  const Composition small{{2, 1}};
  CHECK_THROWS_AS(ccdm_decode(AmplitudeSequence{{1, 0, 0}}, small), NonCodewordError);
}

TEST_CASE("exhaustive bijectivity for small compositions") {
  for (const Composition& c : {Composition{{2, 2, 1}}, Composition{{3, 3}}, Composition{{4, 3, 2}}}) {
    const int k = input_bit_length(c);
    REQUIRE(k <= 12);
    std::set<std::vector<std::uint8_t>> images;
    for (std::uint64_t v = 0; v < (1ull << k); ++v) {
      const auto bits = bits_of(v, k);
      const auto seq = ccdm_encode(bits, c);
      CHECK(histogram(seq, c.counts.size()) == c.counts);
      images.insert(seq.symbols);
      CHECK(ccdm_decode(seq, c) == bits);
    }
    CHECK(images.size() == (1ull << k));  // injective

    // Every valid-composition sequence either decodes or is a non-codeword,
    // and exactly 2^k of them decode.
    std::uint64_t decodable = 0;
    for (const auto& symbols : enumerate_sequences(c)) {
      try {
        ccdm_decode(AmplitudeSequence{symbols}, c);
        ++decodable;
        CHECK(images.count(symbols) == 1);
      } catch (const NonCodewordError&) {
        CHECK(images.count(symbols) == 0);
      }
    }
    CHECK(decodable == (1ull << k));
  }
}

TEST_CASE("rate loss") {
  const auto c10 = composition_from_pmf(kShaped, 10);
  CHECK(kShaped.entropy_bits() == doctest::Approx(1.846439).epsilon(1e-5));
  CHECK(rate_loss(c10, kShaped) == doctest::Approx(1.846439 - 1.3).epsilon(1e-4));
  CHECK(rate_loss({{5}}, {{2.0}, {1.0}}) == 0.0);

  double previous = 1e9;
  for (int n : {10, 100, 1000}) {
    const double loss = rate_loss(composition_from_pmf(kShaped, n), kShaped);
    CHECK(loss >= 0.0);
    CHECK(loss <= previous);
    previous = loss;
  }
}

TEST_CASE("concatenations keep the scaled composition and bounded runs") {
  const Composition c{{4, 3, 2, 1}};
  const int k = input_bit_length(c);
  const int blocks = 50;
  StreamRng rng(2024);

  std::vector<std::uint8_t> stream;
  for (int b = 0; b < blocks; ++b) {
    const auto seq = ccdm_encode(random_bits(rng, k), c);
    stream.insert(stream.end(), seq.symbols.begin(), seq.symbols.end());
  }

  std::vector<int> h(4, 0);
  for (auto s : stream) ++h[s];
  for (int i = 0; i < 4; ++i) CHECK(h[i] == blocks * c.counts[i]);

  const int max_count = *std::max_element(c.counts.begin(), c.counts.end());
  int run = 1, longest = 1;
  for (std::size_t i = 1; i < stream.size(); ++i) {
    run = stream[i] == stream[i - 1] ? run + 1 : 1;
    longest = std::max(longest, run);
  }
  CHECK(longest <= 2 * max_count);
}
