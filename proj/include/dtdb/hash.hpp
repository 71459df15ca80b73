#pragma once

#include <concepts>
#include <cstdint>
#include <span>

namespace dtdb {

/// Seed used by every table unless the caller overrides it. Reported by the CLI.
inline constexpr std::uint64_t kDefaultSeed = 0x2545F4914F6CDD1DULL;

/// splitmix64 finalizer; a bijective 64-bit avalanche mix.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

constexpr std::uint64_t hash_u64(std::uint64_t value, std::uint64_t seed) noexcept {
  return mix64(value ^ seed);
}

constexpr std::uint64_t hash_pair(std::uint64_t a, std::uint64_t b, std::uint64_t seed) noexcept {
  return mix64(mix64(a ^ seed) + b);
}

template <std::unsigned_integral T>
std::uint64_t hash_words(std::span<const T> words, std::uint64_t seed) noexcept {
  std::uint64_t h = mix64(seed ^ (words.size() * 0x9E3779B97F4A7C15ULL));
  for (T w : words) h = mix64(h ^ static_cast<std::uint64_t>(w)) + 0x9E3779B97F4A7C15ULL;
  return h;
}

}  // namespace dtdb
