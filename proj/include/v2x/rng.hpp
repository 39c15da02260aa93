#pragma once

#include <cstdint>
#include <limits>

namespace v2x {

/// xoshiro256** seeded through splitmix64. Cheap to construct, so every
/// Monte Carlo replication gets its own stream keyed by (seed, domain, index)
/// and results do not depend on how replications are scheduled.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  RngStream(std::uint64_t seed, std::uint64_t domain, std::uint64_t index)
      : RngStream(mix(mix(seed) ^ (domain * 0xd1342543de82ef95ULL)) ^ mix(index + 0x632be59bd9b4e019ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t x) {
    std::uint64_t copy = x;
    return splitmix64(copy);
  }

  std::uint64_t state_[4];
};

}  // namespace v2x
