#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lv {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-stage seed: the stage name is hashed and mixed with the top-level seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) noexcept {
  return splitmix64(seed ^ fnv1a64(stage));
}

/// Per-index stream seed, e.g. one generator per patch.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) + index);
}

}  // namespace lv
