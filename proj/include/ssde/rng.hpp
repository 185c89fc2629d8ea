#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "ssde/types.hpp"

namespace ssde {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
  }

  static constexpr Key key_of(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }
};

/// Uniform double in (0, 1] from 53 random bits.
inline double unit_open_closed(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi >> 5} << 26) | (lo >> 6);
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

/// Two independent standard normals from one Philox block (Box-Muller).
inline std::array<double, 2> normal_pair(const Philox4x32::Counter& block) {
  const double u1 = unit_open_closed(block[0], block[1]);
  const double u2 = unit_open_closed(block[2], block[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

/// Standard normal vector of dimension d for (seed, step, stream). The same
/// triple always yields the same vector, regardless of evaluation order.
inline Point gaussian_increment(std::uint64_t seed, std::uint32_t step, std::uint64_t stream,
                                int d, std::uint32_t block_offset = 0) {
  Point xi(d);
  const auto key = Philox4x32::key_of(seed);
  for (int b = 0; 2 * b < d; ++b) {
    const Philox4x32::Counter ctr{step, block_offset + static_cast<std::uint32_t>(b),
                                  static_cast<std::uint32_t>(stream),
                                  static_cast<std::uint32_t>(stream >> 32)};
    const auto z = normal_pair(Philox4x32::apply(ctr, key));
    xi[2 * b] = z[0];
    if (2 * b + 1 < d) xi[2 * b + 1] = z[1];
  }
  return xi;
}

/// Sequential draws from one Philox stream, for sampling tasks that are not
/// indexed by a time step.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t tag = 0xFFFFFFFFu)
      : key_(Philox4x32::key_of(seed)),
        stream_(stream),
        tag_(tag) {}

  Philox4x32::Counter next_block() {
    const Philox4x32::Counter ctr{tag_, counter_++, static_cast<std::uint32_t>(stream_),
                                  static_cast<std::uint32_t>(stream_ >> 32)};
    return Philox4x32::apply(ctr, key_);
  }

  /// Uniform in (0, 1].
  double uniform() {
    if (spare_uniform_) {
      spare_uniform_ = false;
      return unit_open_closed(cached_[2], cached_[3]);
    }
    cached_ = next_block();
    spare_uniform_ = true;
    return unit_open_closed(cached_[0], cached_[1]);
  }

  double normal() {
    if (spare_normal_) {
      spare_normal_ = false;
      return normal_spare_;
    }
    const auto z = normal_pair(next_block());
    normal_spare_ = z[1];
    spare_normal_ = true;
    return z[0];
  }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint32_t tag_;
  std::uint32_t counter_ = 0;
  Philox4x32::Counter cached_{};
  bool spare_uniform_ = false;
  bool spare_normal_ = false;
  double normal_spare_ = 0.0;
};

}  // namespace ssde
