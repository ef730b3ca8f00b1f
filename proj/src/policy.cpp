#include "hxd/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hxd {

namespace {
int level_from_rule(double scale, std::size_t n, double e1, double e2) {
  const double nn = static_cast<double>(n);
  const double target = scale * std::pow(nn, e1) * std::pow(std::log(nn), e2);
  return std::max(0, static_cast<int>(std::lround(std::log2(target))));
}
}  // namespace

int select_level(const SmoothingPolicy& policy, std::size_t n, int dim) {
  if (n < 2) throw std::invalid_argument("select_level: requires n >= 2");
  if (dim < 1) throw std::invalid_argument("select_level: requires D >= 1");
  const double d = dim;
  return std::visit(
      [&](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TruncationFourier>) {
          const double den = 2.0 * p.alpha + 1.0;
          return level_from_rule(p.scale_c, n, 1.0 / den, d * (p.alpha + p.nu + 1.0) / den);
        } else if constexpr (std::is_same_v<T, TruncationWavelet>) {
          const double den = 2.0 * p.alpha;
          return level_from_rule(p.scale_c, n, 1.0 / den, d * (p.alpha + p.nu + 0.5) / den);
        } else {
          if (p.level) return std::max(0, *p.level);
          const double l = std::log2(10.0 * static_cast<double>(n)) / (2.0 * p.alpha);
          return std::max(0, static_cast<int>(std::ceil(l)));
        }
      },
      policy);
}

double policy_multiplier(const SmoothingPolicy& policy, int block_order, std::size_t n, double variance) {
  if (const auto* w = std::get_if<Wahba>(&policy)) {
    const double c = w->variance_c.value_or(variance);
    return 1.0 / (1.0 + c * std::exp2(2.0 * block_order * w->alpha) / static_cast<double>(n));
  }
  return 1.0;
}

bool needs_sample_variance(const SmoothingPolicy& policy) {
  const auto* w = std::get_if<Wahba>(&policy);
  return w != nullptr && !w->variance_c.has_value();
}

void check_policy_basis(const SmoothingPolicy& policy, BasisKind basis) {
  if (std::holds_alternative<TruncationFourier>(policy) && basis != BasisKind::Fourier)
    throw std::invalid_argument("truncation-fourier policy requires the Fourier basis");
  if (std::holds_alternative<TruncationWavelet>(policy) && basis != BasisKind::HaarWavelet)
    throw std::invalid_argument("truncation-wavelet policy requires the Haar basis");
  std::visit(
      [](const auto& p) {
        if (!(p.alpha > 0.0)) throw std::invalid_argument("policy alpha must be > 0");
      },
      policy);
}

std::string policy_name(const SmoothingPolicy& policy) {
  switch (policy.index()) {
    case 0: return "truncation-fourier";
    case 1: return "truncation-wavelet";
    default: return "wahba";
  }
}

}  // namespace hxd
