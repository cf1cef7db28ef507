#pragma once

// Counter-based random streams built on Philox4x32-10 (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11). A stream is keyed by
// (seed, stream_index); distinct indices give statistically independent
// streams, so parallel work units can each own one without coordination.

#include <array>
#include <cmath>
#include <cstdint>

namespace dtpc {

// One mixing step of SplitMix64; used to derive sub-seeds for nested stream
// families (e.g. one seed per simulation trial).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        counter_{0u, 0u, static_cast<std::uint32_t>(stream_index),
                 static_cast<std::uint32_t>(stream_index >> 32)} {}

  // One Philox4x32-10 block. Exposed so the known-answer vectors from the
  // reference implementation can be checked directly.
  static std::array<std::uint32_t, 4> philox_block(
      std::array<std::uint32_t, 2> key, std::array<std::uint32_t, 4> ctr) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
      const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;  // golden ratio
      key[1] += 0xBB67AE85u;  // sqrt(3) - 1
    }
    return ctr;
  }

  std::uint64_t next_u64() {
    if (pos_ >= 4) {
      buffer_ = philox_block(key_, counter_);
      if (++counter_[0] == 0u) ++counter_[1];  // 64-bit block counter
      pos_ = 0;
    }
    const std::uint64_t lo = buffer_[pos_];
    const std::uint64_t hi = buffer_[pos_ + 1];
    pos_ += 2;
    return lo | (hi << 32);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe to pass to log().
  double uniform_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559005768;
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = two_pi * uniform();
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace dtpc
