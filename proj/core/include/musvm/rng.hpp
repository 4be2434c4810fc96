#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace musvm {

/// Deterministic uniform draw in [0, bound) that does not depend on the
/// standard library's distribution internals, so seeded runs reproduce
/// byte-for-byte.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  // Rejection sampling on the top of the range to stay unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

/// First `count` elements of a seeded shuffle of 0..population-1.
std::vector<std::size_t> inline sample_without_replacement(
    std::size_t population, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(population);
  for (std::size_t i = 0; i < population; ++i) idx[i] = i;
  deterministic_shuffle(idx, rng);
  idx.resize(count);
  return idx;
}

}  // namespace musvm
