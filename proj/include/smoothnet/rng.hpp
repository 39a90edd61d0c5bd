#pragma once
// Deterministic seed derivation: every random consumer (data noise, weight
// init, ABCD masks, VAT directions, batch sampling) gets its own stream
// derived from one root seed, so components can be varied independently.

#include <cstdint>
#include <random>

namespace smoothnet {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t {
  DataNoise = 1,
  LabelSplit = 2,
  Init = 3,
  Masks = 4,
  VatDirections = 5,
  Batches = 6,
  Probe = 7,
};

inline std::uint64_t derive_seed(std::uint64_t root, Stream stream) {
  return splitmix64(splitmix64(root) ^ static_cast<std::uint64_t>(stream));
}

// Extra lane on top of a stream, e.g. one lane per sweep job.
inline std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t lane) {
  return splitmix64(derive_seed(root, stream) ^ splitmix64(lane));
}

inline std::mt19937_64 make_rng(std::uint64_t root, Stream stream) {
  return std::mt19937_64(derive_seed(root, stream));
}

inline std::mt19937_64 make_rng(std::uint64_t root, Stream stream, std::uint64_t lane) {
  return std::mt19937_64(derive_seed(root, stream, lane));
}

}  // namespace smoothnet
