#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <string_view>

namespace aicrowd {

// SplitMix64 finalizer. Bijective scramble of a 64-bit value.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for stream `stream` derived from a parent seed. Streams are
// independent of the order they are consumed in, which is what makes
// bootstrap replicates and mock annotator cells order-insensitive.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + (stream + 1) * 0x9e3779b97f4a7c15ULL);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform draw in [0, n) by masked rejection. std::uniform_int_distribution
// is implementation-defined, so it cannot back any seeded contract; this can.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  assert(n > 0);
  std::uint64_t mask = n - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    std::uint64_t v = rng() & mask;
    if (v < n) return v;
  }
}

// Uniform double in [0, 1) with 53-bit resolution.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace aicrowd
