#pragma once

#include <cstdint>

namespace acd {

// Counter-based random streams. Every draw is a pure function of
// (key, counter), so trials and steps can be regenerated independently and in
// any order. Keys are derived from (seed, trial, stream) by hashing.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sub-seed scheme: key = mix(mix(mix(seed) + trial) + stream). Documented in
// README; changing it changes every recorded experiment.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t trial,
                                   std::uint64_t stream) {
  std::uint64_t k = mix64(seed + kGolden);
  k = mix64(k + (trial + 1) * kGolden);
  k = mix64(k + (stream + 1) * 0xd1b54a32d192ed03ULL);
  return k;
}

// Well-known stream identifiers.
enum class Stream : std::uint64_t {
  coordinates = 1,
  lipschitz = 2,
  walk = 3,
  coupling_s1 = 4,
  coupling_s2 = 5,
  reappearing = 6,
  state = 7,
};

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  CounterRng(std::uint64_t seed, std::uint64_t trial, Stream stream)
      : CounterRng(derive_key(seed, trial, static_cast<std::uint64_t>(stream))) {}

  // Draw number `i` of this stream, independent of the cursor.
  constexpr std::uint64_t at(std::uint64_t i) const {
    return mix64(key_ + (i + 1) * kGolden);
  }

  constexpr std::uint64_t next() { return at(counter_++); }

  // Uniform in [0, bound). Multiply-shift; bias is at most bound / 2^64.
  std::uint64_t below(std::uint64_t bound) { return below_from(next(), bound); }

  static std::uint64_t below_from(std::uint64_t bits, std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits) * bound) >> 64);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t counter() const { return counter_; }
  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace acd
