#pragma once

#include <cstdint>
#include <random>

namespace pbj {

// splitmix64 finalizer; decorrelates (seed, stream) pairs before seeding.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic per-replicate stream. Replicate b always sees the same
// generator state for a given master seed, whatever thread runs it, so
// parallel and serial runs agree bitwise.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix64(mix64(seed) ^ mix64(stream + 1)));
}

}  // namespace pbj
