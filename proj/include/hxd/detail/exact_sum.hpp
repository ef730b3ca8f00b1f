#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace hxd::detail {

/// Order-independent sum of doubles: every term is added exactly into a
/// fixed-point accumulator of 32-bit limbs, so the result does not depend on
/// the order of the additions. Finite inputs only.
class ExactSum {
 public:
  void add(double v) {
    if (v == 0.0) return;
    int exp = 0;
    const double frac = std::frexp(v, &exp);                              // v = frac * 2^exp, |frac| in [0.5, 1)
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));  // exact, |mant| < 2^53
    const int e = exp - 53 + kBias;                                      // v = mant * 2^(e - kBias)
    const int limb = e / 32;
    const int shift = e % 32;
    const bool neg = mant < 0;
    const unsigned __int128 m = static_cast<unsigned __int128>(neg ? -mant : mant) << shift;
    for (int i = 0; i < 3 && limb + i < kLimbs; ++i) {
      const auto part = static_cast<std::int64_t>((m >> (32 * i)) & 0xFFFFFFFFu);
      limbs_[static_cast<std::size_t>(limb + i)] += neg ? -part : part;
    }
    if (++pending_ >= (1 << 30)) normalize();
  }

  void add(const ExactSum& other) {
    for (std::size_t i = 0; i < limbs_.size(); ++i) limbs_[i] += other.limbs_[i];
    normalize();
  }

  double value() {
    normalize();
    if (limbs_.back() < 0) {
      ExactSum neg;
      for (std::size_t i = 0; i < limbs_.size(); ++i) neg.limbs_[i] = -limbs_[i];
      return -neg.value();
    }
    double out = 0.0;
    for (int i = kLimbs - 1; i >= 0; --i) {
      const std::int64_t l = limbs_[static_cast<std::size_t>(i)];
      if (l != 0) out += std::ldexp(static_cast<double>(l), 32 * i - kBias);
    }
    return out;
  }

 private:
  // covers 2^-1100 .. 2^1100
  static constexpr int kBias = 1100;
  static constexpr int kLimbs = 2200 / 32 + 3;

  // canonical carry propagation: every limb except the top one ends in [0, 2^32)
  void normalize() {
    for (int i = 0; i + 1 < kLimbs; ++i) {
      std::int64_t& l = limbs_[static_cast<std::size_t>(i)];
      const std::int64_t carry = l >> 32;  // arithmetic shift: floor division
      l -= carry * (std::int64_t{1} << 32);
      limbs_[static_cast<std::size_t>(i + 1)] += carry;
    }
    pending_ = 0;
  }

  std::array<std::int64_t, kLimbs> limbs_{};
  int pending_ = 0;
};

}  // namespace hxd::detail
