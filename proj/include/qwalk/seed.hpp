#pragma once

#include <cstdint>

namespace qwalk {

/// SplitMix64 output function (Steele, Lea & Flood 2014). A bijection on
/// 64-bit words with good avalanche behaviour.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for realization `realization` of disorder strength `w_index`.
///
/// The pair (w_index, realization) is packed into one 64-bit key (32 bits
/// each), xor-ed with a mixed master seed and passed through splitmix64.
/// Both steps are bijective, so for a fixed master seed distinct
/// (w_index, realization) pairs with components below 2^32 never collide.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint32_t w_index,
                                    std::uint32_t realization) noexcept {
  const std::uint64_t key = (static_cast<std::uint64_t>(w_index) << 32) | realization;
  return splitmix64(key ^ splitmix64(master_seed));
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Used
/// instead of std::uniform_real_distribution, whose output is not specified
/// bit-for-bit across standard libraries.
constexpr double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace qwalk
