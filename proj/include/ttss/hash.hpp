#pragma once

#include <cstdint>
#include <span>

namespace ttss {

// FNV-1a 64-bit. The seed is XORed into the offset basis so tests can
// re-seed or degrade the hash without touching key layout.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                             std::uint64_t seed = 0) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ttss
