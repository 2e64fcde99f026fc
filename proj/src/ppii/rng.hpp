#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ppii {

using SeededStream = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive hash of a stream key, e.g. (seed, image, anomaly, rater).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

inline SeededStream make_stream(std::initializer_list<std::uint64_t> parts) {
  return SeededStream(derive_seed(parts));
}

}  // namespace ppii
