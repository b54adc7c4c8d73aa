#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace assemblage {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: word k of stream (seed, r) is
///   splitmix64(key + k * 0x9E3779B97F4A7C15), key = splitmix64(splitmix64(seed) + r).
/// Output depends only on (seed, r, k), so any permutation can be rebuilt
/// independently on any platform.
class CounterStream {
public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(splitmix64(splitmix64(seed) + stream)) {}

  std::uint64_t next() noexcept { return splitmix64(key_ + counter_++ * 0x9E3779B97F4A7C15ULL); }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) noexcept;

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle of `index` driven by CounterStream(seed, stream),
/// swapping position i with below(i + 1) for i = n-1 down to 1.
void shuffle_indices(std::span<std::size_t> index, std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace assemblage
