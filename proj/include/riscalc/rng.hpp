#pragma once

// Counter-based random numbers (Philox4x64-10). Every Monte Carlo sample
// owns a substream keyed by (seed, sample index), so results do not depend
// on how samples are split across workers.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace riscalc::rng {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

constexpr PhiloxCounter philox4x64(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kM0) * ctr[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

/// Maps 64 random bits to a double in the open interval (0, 1).
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Stream of uniforms/normals for one substream. Each Philox block yields
/// four uniforms, turned into four normals by two Box-Muller pairs.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t substream)
      : key_{seed, 0x52495343414C43ULL}, substream_(substream) {}

  /// Four standard normals from the next block.
  std::array<double, 4> next_normal_block() {
    const auto bits = next_block();
    std::array<double, 4> out{};
    for (int pair = 0; pair < 2; ++pair) {
      const double u1 = to_open_unit(bits[2 * pair]);
      const double u2 = to_open_unit(bits[2 * pair + 1]);
      const double radius = std::sqrt(-2.0 * std::log(u1));
      const double angle = 2.0 * std::numbers::pi * u2;
      out[2 * pair] = radius * std::cos(angle);
      out[2 * pair + 1] = radius * std::sin(angle);
    }
    return out;
  }

  /// Four uniforms in (0, 1) from the next block.
  std::array<double, 4> next_uniform_block() {
    const auto bits = next_block();
    return {to_open_unit(bits[0]), to_open_unit(bits[1]), to_open_unit(bits[2]),
            to_open_unit(bits[3])};
  }

  std::uint64_t blocks_used() const { return block_; }

 private:
  PhiloxCounter next_block() { return philox4x64({block_++, substream_, 0, 0}, key_); }

  PhiloxKey key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
};

}  // namespace riscalc::rng
