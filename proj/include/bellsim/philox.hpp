#pragma once

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror & Shaw, SC'11).
// A block of four 32-bit outputs is a pure function of a 128-bit counter and
// a 64-bit key, so any stream position can be produced independently.

#include <array>
#include <cstdint>

namespace bellsim {

class Philox4x32 {
 public:
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(key_type key) : key_(key) {}
  explicit constexpr Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr counter_type operator()(counter_type ctr) const {
    key_type k = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k[0] += kWeyl0;
        k[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ k[0], lo1, hi0 ^ ctr[3] ^ k[1], lo0};
    }
    return ctr;
  }

  constexpr key_type key() const { return key_; }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  key_type key_;
};

/// Uniform in [0, 1) with 53 random bits from two output words.
constexpr double uniform53(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Uniform in [0, 1) from one output word.
constexpr double uniform32(std::uint32_t w) { return static_cast<double>(w) * 0x1.0p-32; }

}  // namespace bellsim
