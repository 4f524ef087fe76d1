#pragma once

#include <cstdint>

// Counter-based deterministic random streams. Every consumer derives an
// independent stream from (seed, slot, lane), so results never depend on
// how work is split across threads.

namespace mdiqkd {

/// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// A small deterministic generator seeded from a derived key.
class RandomStream {
 public:
  explicit constexpr RandomStream(std::uint64_t key) : state_(key) {}

  constexpr std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

/// Derives the stream key for one (seed, slot, lane) triple.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t slot,
                                   std::uint64_t lane) {
  return mix64(seed ^ mix64(slot ^ mix64(lane ^ 0xa02b_dbf7_bb3c_0a7full)));
}

inline RandomStream make_stream(std::uint64_t seed, std::uint64_t slot,
                                std::uint64_t lane) {
  return RandomStream(stream_key(seed, slot, lane));
}

}  // namespace mdiqkd
