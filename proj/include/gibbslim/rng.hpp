#pragma once

// Counter-based random numbers (Philox 4x32-10).  A draw is addressed by
// (seed, stream id, draw index, slot), so samples are reproducible under any
// evaluation order and disjoint index ranges can be merged exactly.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gibbslim::rng {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
           std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
  }
  return ctr;
}

// strictly inside (0,1); the very top value would round to 1.0, clamp it
inline double uniform_from(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
  const double u = (double(bits >> 11) + 0.5) * 0x1p-53;
  return u < 1.0 ? u : 0x1.fffffffffffffp-1;
}

struct Stream {
  std::uint64_t seed = 0;
  std::uint32_t id = 0;
};

// one counter block -> two independent standard normals (Box-Muller)
inline std::array<double, 2> normal_pair(const Stream& s, std::uint64_t draw,
                                         std::uint32_t slot) {
  const Counter c{std::uint32_t(draw), std::uint32_t(draw >> 32), slot, s.id};
  const Key k{std::uint32_t(s.seed), std::uint32_t(s.seed >> 32)};
  const Counter v = philox4x32(c, k);
  const double u1 = uniform_from(v[0], v[1]);
  const double u2 = uniform_from(v[2], v[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * std::numbers::pi * u2),
          r * std::sin(2.0 * std::numbers::pi * u2)};
}

}  // namespace gibbslim::rng
