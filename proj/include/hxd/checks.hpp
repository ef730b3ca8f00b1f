#pragma once

// Fast invariant battery behind `hxd selfcheck`.

#include <cstdint>
#include <string>
#include <vector>

namespace hxd {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelfcheckOptions {
  std::uint64_t seed = 1;
  /// Test fixture: swap two fitted coefficients so the layout check must fail.
  bool corrupt_layout = false;
};

CheckResult check_combinatorics();
CheckResult check_orthonormality();
CheckResult check_coefficient_layout(std::uint64_t seed, bool corrupt);
CheckResult check_smoothing_identity(int triples, std::uint64_t seed);
CheckResult check_variance_oracle(int instances, std::uint64_t seed);

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options);

}  // namespace hxd
