#pragma once

// Counter-based random numbers. Every Monte Carlo sample owns a stream keyed
// by (seed, sample index), so results do not depend on how samples are
// distributed over threads.

#include <array>
#include <cstdint>

namespace fdrelay::rng {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Uniform stream for one (seed, sample index) pair.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        index_(index) {}

  /// Uniform double in the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    if (pos_ == 2) refill();
    return buf_[pos_++];
  }

 private:
  void refill() noexcept {
    const Philox4x32::Counter ctr = {block_++, static_cast<std::uint32_t>(index_),
                                     static_cast<std::uint32_t>(index_ >> 32), 0u};
    const auto out = Philox4x32::generate(ctr, key_);
    buf_[0] = to_unit(out[0], out[1]);
    buf_[1] = to_unit(out[2], out[3]);
    pos_ = 0;
  }

  static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t index_;
  std::uint32_t block_ = 0;
  std::array<double, 2> buf_{};
  int pos_ = 2;
};

}  // namespace fdrelay::rng
