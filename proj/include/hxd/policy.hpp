#pragma once

// Smoothing policies: the multipliers b_{s,n} applied to empirical
// coefficients, and the level rules that bound the retained cross.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "hxd/hypercross.hpp"

namespace hxd {

/// Hard truncation at 2^l ~ scale_c n^{1/(2a+1)} (log n)^{D(a+nu+1)/(2a+1)}; Fourier basis.
struct TruncationFourier {
  double alpha = 1.0;
  double nu = 0.5;
  double scale_c = 1.0;
};

/// Hard truncation at 2^l ~ scale_c n^{1/(2a)} (log n)^{D(a+nu+1/2)/(2a)}; wavelet basis.
struct TruncationWavelet {
  double alpha = 1.0;
  double nu = 0.5;
  double scale_c = 1.0;
};

/// b = [1 + c 2^{2|k| alpha} / n]^{-1}. Without `variance_c` the per-index
/// sample variance of phi_s(X) is used. `level` caps the cross; when absent
/// the cap is the first level where 2^{2 l alpha} >= 10 n.
struct Wahba {
  double alpha = 1.0;
  std::optional<double> variance_c;
  std::optional<int> level;
};

using SmoothingPolicy = std::variant<TruncationFourier, TruncationWavelet, Wahba>;

/// Level of the retained cross. Throws for n < 2.
int select_level(const SmoothingPolicy& policy, std::size_t n, int dim);

/// Multiplier for an index of block order |k|; `variance` is the per-index
/// c used by Wahba when no global constant is configured.
double policy_multiplier(const SmoothingPolicy& policy, int block_order, std::size_t n, double variance);

/// True when the policy needs per-index variances from the data.
bool needs_sample_variance(const SmoothingPolicy& policy);

/// Throws if the policy cannot be used with the basis.
void check_policy_basis(const SmoothingPolicy& policy, BasisKind basis);

std::string policy_name(const SmoothingPolicy& policy);

}  // namespace hxd
