#pragma once

#include <cstdint>
#include <initializer_list>

namespace radloc {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix_seed(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

/// Independent stream seed for (seed, i0, i1, ...). Lets parallel workers
/// draw the same numbers a serial run would.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix_seed(seed);
  for (std::uint64_t k : keys) h = mix_seed(h ^ mix_seed(k + 0x632BE59BD9B4E019ULL));
  return h;
}

}  // namespace radloc
