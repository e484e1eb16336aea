#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace agraph {

// SplitMix64 (Steele, Lea, Flood 2014):
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
//
// Derived draws (uniform_below, bernoulli, shuffles) are specified below and
// in README.md so scenario files can be reproduced bit-for-bit.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Independent stream for sub-task `stream` of a run seeded with `seed`.
  static SplitMix64 derived(std::uint64_t seed, std::uint64_t stream) noexcept {
    return SplitMix64(mix(seed + kGolden * (stream + 1)));
  }

  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform in [0, n) by rejection: draws r until r >= (2^64 - n) mod n,
  // then returns r mod n. n == 0 returns 0 without drawing.
  std::uint64_t uniform_below(std::uint64_t n) noexcept {
    if (n == 0) return 0;
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform double in [0, 1) from the top 53 bits.
  double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // True with probability p. Always draws exactly once.
  bool bernoulli(double p) noexcept { return uniform01() < p; }

  // Fisher-Yates from the back: for i = n-1 down to 1, swap(v[i], v[uniform_below(i+1)]).
  template <typename T>
  void shuffle(std::vector<T>& v) noexcept {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Uniform k-prefix: partial Fisher-Yates from the front; the first k
  // elements of v become a uniformly random ordered k-selection.
  template <typename T>
  void partial_shuffle(std::vector<T>& v, std::size_t k) noexcept {
    for (std::size_t i = 0; i < k && i + 1 < v.size(); ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_below(v.size() - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace agraph
