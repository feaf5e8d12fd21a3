#pragma once

// Counter-based normal variates: every (seed, stream, counter) triple maps to
// the same number regardless of how many other streams were drawn, so path i
// of a bundle is identical for M = 100 and M = 10^6.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace svito {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_words(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

inline constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  return hash_words(hash_words(seed, stream), counter);
}

/// Uniform on the open interval (0, 1).
inline double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  return (static_cast<double>(counter_bits(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal by Box-Muller on two consecutive counters.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) noexcept {
  const double u1 = counter_uniform(seed, stream, 2 * counter);
  const double u2 = counter_uniform(seed, stream, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace svito
