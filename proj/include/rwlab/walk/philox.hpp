#pragma once

// Philox4x32-10 (Salmon, Moraes, Dror, Shaw, SC'11), the counter-based
// generator behind every random draw of the walk engine. A draw is a pure
// function of (key, counter), so trials can run in any order on any number
// of threads and still see the same increments.
//
// Stream layout, fixed so pinned seeds stay valid across versions:
//   key     = (seed & 0xffffffff, seed >> 32)
//   counter = (step, trial & 0xffffffff, trial >> 32, stream)
// Step n of trial t uses the first two output words of counter (n, t, 0).

#include <array>
#include <cstdint>

namespace rwlab {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57;
  static constexpr std::uint32_t kW0 = 0x9E3779B9;
  static constexpr std::uint32_t kW1 = 0xBB67AE85;
};

// Uniform [0, 1) variates addressed by (seed, trial, step, stream).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Philox4x32::Block block(std::uint64_t trial, std::uint32_t step, std::uint32_t stream = 0) const {
    return Philox4x32::generate(
        {step, static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), stream}, key_);
  }

  // 53-bit double from the first two words of the block.
  double uniform(std::uint64_t trial, std::uint32_t step, std::uint32_t stream = 0) const {
    const auto b = block(trial, step, stream);
    const std::uint64_t hi = b[0] >> 5;  // 27 bits
    const std::uint64_t lo = b[1] >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

 private:
  Philox4x32::Key key_;
};

}  // namespace rwlab
