#pragma once

#include <cstdint>
#include <random>

namespace jnt {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for an independent substream identified by (master, a, b). Work items
// that draw from their own substream give the same numbers no matter which
// thread or in what order they run.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a,
                                       std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return Rng(substream_seed(master, a, b));
}

// Stream tags so different consumers of one master seed never collide.
namespace stream {
inline constexpr std::uint64_t cv_split = 0x43565350;       // "CVSP"
inline constexpr std::uint64_t sim_noise = 0x53494d4e;      // "SIMN"
inline constexpr std::uint64_t boot_np = 0x424f4f54;        // "BOOT"
inline constexpr std::uint64_t boot_null = 0x4e554c4c;      // "NULL"
inline constexpr std::uint64_t boot_param = 0x5041524d;     // "PARM"
}  // namespace stream

}  // namespace jnt
