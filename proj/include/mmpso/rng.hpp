#pragma once

#include <cstdint>
#include <limits>

namespace mmpso {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Identifies an independent random stream: the run seed plus a purpose tag.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t purpose = 0;

  /// Key of the sub-stream addressed by (a, b), e.g. (step, particle).
  constexpr std::uint64_t derive(std::uint64_t a, std::uint64_t b) const {
    return splitmix64(splitmix64(splitmix64(seed) ^ purpose) ^ a) ^ splitmix64(b + 0x632BE59BD9B4E019ULL);
  }
};

namespace streams {
inline constexpr std::uint64_t init_positions = 1;
inline constexpr std::uint64_t micro_noise = 2;
}  // namespace streams

/// SplitMix64 generator, a UniformRandomBitGenerator cheap enough to create per particle and step.
class SplitMixEngine {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMixEngine(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace mmpso
