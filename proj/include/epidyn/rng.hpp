#pragma once

// Splittable 64-bit random streams.
//
// Every (seed, replicate, agent, step) tuple maps to an independent SplitMix64
// stream:
//
//   key = mix(mix(mix(mix(seed ^ K0) ^ replicate * K1) ^ agent * K2) ^ step * K3)
//
// where mix is the SplitMix64 finalizer. Agent draws are therefore independent
// of the order in which agents (or replicates) are processed.

#include <cstdint>
#include <limits>

namespace epidyn {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 (Steele, Lea, Flood 2014). Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t agent,
                                             std::uint64_t step) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ (replicate * 0xbb67ae8584caa73bULL));
  h = mix64(h ^ (agent * 0x3c6ef372fe94f82bULL));
  h = mix64(h ^ (step * 0xa54ff53a5f1d36f1ULL));
  return h;
}

/// Stream factory for one replicate.
class RngStreams {
 public:
  constexpr RngStreams(std::uint64_t seed, std::uint64_t replicate) : seed_(seed), replicate_(replicate) {}

  SplitMix64 for_agent(std::uint64_t agent, std::uint64_t step) const {
    return SplitMix64(derive_stream(seed_, replicate_, agent, step));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replicate() const { return replicate_; }

 private:
  std::uint64_t seed_;
  std::uint64_t replicate_;
};

}  // namespace epidyn
