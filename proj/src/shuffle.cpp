#include "assemblage/shuffle.hpp"

#include <utility>

namespace assemblage {

std::uint64_t CounterStream::below(std::uint64_t bound) noexcept {
  using u128 = unsigned __int128;
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

void shuffle_indices(std::span<std::size_t> index, std::uint64_t seed, std::uint64_t stream) noexcept {
  CounterStream rng(seed, stream);
  for (std::size_t i = index.size(); i > 1; --i) {
    const auto k = static_cast<std::size_t>(rng.below(i));
    std::swap(index[i - 1], index[k]);
  }
}

}  // namespace assemblage
