#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ltfbm {

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed splitting: seed_i = mix(master, i). Distinct i give statistically
/// unrelated Philox keys.
inline std::uint64_t mix(std::uint64_t master, std::uint64_t i) {
  return splitmix64(master ^ splitmix64(i + 0x632be59bd9b4e019ULL));
}

/// Philox4x32-10 (Salmon et al. 2011). Counter-based: the state is a 128-bit
/// counter and a 64-bit key, so streams never need coordination.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xffffffffU; }

  result_type operator()() {
    if (idx_ == 4) {
      block_ = round10(ctr_, key_);
      bump();
      idx_ = 0;
    }
    return block_[idx_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform()); }

  /// Standard normal by the Marsaglia polar method; the second deviate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block round10(const Block& in, const Key& key) {
    std::uint32_t c0 = in[0], c1 = in[1], c2 = in[2], c3 = in[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int r = 0; r < 10; ++r) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(0xD2511F53U) * c0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(0xCD9E8D57U) * c2;
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      c0 = hi1 ^ c1 ^ k0;
      c1 = lo1;
      c2 = hi0 ^ c3 ^ k1;
      c3 = lo0;
      k0 += 0x9E3779B9U;
      k1 += 0xBB67AE85U;
    }
    return {c0, c1, c2, c3};
  }

  void bump() {
    for (auto& w : ctr_) {
      if (++w != 0) break;
    }
  }

  Key key_;
  Block ctr_{0, 0, 0, 0};
  Block block_{};
  int idx_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

using Rng = Philox4x32;

}  // namespace ltfbm
