#pragma once

#include <array>
#include <cstdint>

namespace msched::sim {

/// Philox4x32-10 counter-based generator.  Streams are split by putting the
/// replication index and a purpose tag into the counter words, so draws are
/// reproducible bit-for-bit regardless of evaluation order or platform.
struct Philox {
  std::uint32_t key0 = 0, key1 = 0;

  explicit Philox(std::uint64_t seed)
      : key0(static_cast<std::uint32_t>(seed)),
        key1(static_cast<std::uint32_t>(seed >> 32)) {}

  static std::array<std::uint32_t, 4> round10(std::array<std::uint32_t, 4> ctr,
                                              std::uint32_t k0, std::uint32_t k1) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
      if (r) {
        k0 += w0;
        k1 += w1;
      }
      std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
      std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  std::array<std::uint32_t, 4> block(std::uint32_t tag, std::uint32_t a, std::uint32_t b,
                                     std::uint32_t rep) const {
    return round10({tag, a, b, rep}, key0, key1);
  }

  /// Uniform double in (0, 1].
  double uniform(std::uint32_t tag, std::uint32_t a, std::uint32_t b, std::uint32_t rep) const {
    auto x = block(tag, a, b, rep);
    std::uint64_t bits = (static_cast<std::uint64_t>(x[0]) << 32) | x[1];
    return 1.0 - static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
};

}  // namespace msched::sim
