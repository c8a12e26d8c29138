#pragma once

#include <cstdint>
#include <random>

namespace uavroute {

using Rng = std::mt19937_64;

// The helpers below draw directly from the engine instead of going through
// <random> distributions, whose output is implementation-defined. Tables
// written by the CLI stay byte-identical across standard libraries.

// Derives an independent stream seed from a base seed and a tag, so that
// e.g. topology placement and queue sampling never share a stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [lo, hi], inclusive. Rejection sampling keeps it exact.
inline long long uniform_int(Rng& rng, long long lo, long long hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return lo + static_cast<long long>(rng());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<long long>(x % span);
}

}  // namespace uavroute
