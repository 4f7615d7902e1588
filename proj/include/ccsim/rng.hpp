#pragma once

#include <cstdint>
#include <random>

namespace ccsim {

// splitmix64 finalizer. Used to derive independent substream seeds from a
// base seed plus an arbitrary list of coordinate tags, so that parallel
// workers never share or race an RNG stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t acc) { return splitmix64(acc); }

template <class... Tags>
constexpr std::uint64_t mix_seed(std::uint64_t acc, std::uint64_t tag, Tags... rest) {
  return mix_seed(splitmix64(acc ^ splitmix64(tag + 0x632be59bd9b4e019ull)), rest...);
}

// Deterministic RNG for one logical stream. mt19937_64 output is pinned by
// the standard; normal deviates are produced here with Box-Muller instead of
// std::normal_distribution (whose algorithm is implementation-defined), so a
// given seed reproduces identical streams on any toolchain.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t u64() { return eng_(); }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % bound;
  }

  // Standard normal deviate.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so the log is finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ccsim
