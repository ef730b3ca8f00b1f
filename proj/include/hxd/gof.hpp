#pragma once

// Goodness-of-fit test: the U-statistic T_n with the centred projection
// kernel, its wild-bootstrap threshold and the variance estimator behind the
// normal approximation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hxd/basis.hpp"
#include "hxd/sample_matrix.hpp"
#include "hxd/spectral.hpp"

namespace hxd {

struct GofConfig {
  BasisKind basis = BasisKind::HaarWavelet;
  std::optional<int> level;  // auto from `alpha` when empty
  double alpha = 1.0;
  double significance = 0.05;
  int bootstrap_reps = 1000;
  double flip_prob = 0.5;
  std::uint64_t seed = 0;
  /// Use the centred kernel in the bootstrap statistic as well.
  bool center_bootstrap = false;
};

/// The configured level, or 2^l ~ n^{1/(2a)} (log n)^{D(a+1/2)/(2a)}.
int gof_level(const GofConfig& cfg, std::size_t n, int dim);

/// Null density on the test's cross: either factored per dimension or an
/// explicit table. Both expose the two centring terms of the kernel.
class NullDensity {
 public:
  NullDensity(ProductCoefficients product);  // NOLINT(google-explicit-constructor)
  NullDensity(CoefficientTable table);       // NOLINT(google-explicit-constructor)

  /// Uniform density (DC coefficient only).
  static NullDensity uniform(BasisKind basis, int dim, int level);

  BasisKind basis() const;
  int dim() const;
  int level() const;

  /// E_{X~p0} H_l(x, X) = sum_{|k|<=l} sum_s phi_s(x) p0_s.
  double mean_kernel(Point x, int level) const;
  /// E_{X,Y~p0} H_l(X, Y) = sum_{|k|<=l} sum_s p0_s^2.
  double energy(int level) const;

  /// Throws std::invalid_argument unless the null covers the cross of `level`.
  void check(BasisKind basis, int dim, int level) const;

 private:
  std::variant<ProductCoefficients, CoefficientTable> rep_;
};

/// H_l(x, y) = sum over the level-l cross of phi_s(x) phi_s(y), evaluated in
/// closed form per dimension without enumerating the cross.
double kernel_H(Point x, Point y, BasisKind basis, int level);
double kernel_H(Point x, Point y, const GofConfig& cfg);  // requires cfg.level

/// H(x,y) - E H(x,X) - E H(X,y) + E H(X,Y) under the null.
double centered_kernel(Point x, Point y, const NullDensity& p0, const GofConfig& cfg);

/// U-statistic (1/(n(n-1))) sum_{i != j} centred H(X_i, X_j).
double statistic_T(const SampleMatrix& samples, const NullDensity& p0, const GofConfig& cfg);

/// B wild-bootstrap replicates of (1/(n(n-1))) sum_{i != j} B_i B_j H(X_i, X_j).
std::vector<double> wild_bootstrap(const SampleMatrix& samples, const GofConfig& cfg);

/// The three U-statistic terms of the variance estimator.
struct VarianceTerms {
  double pairs = 0.0;     // (1/(n(n-1))) sum H^2
  double triples = 0.0;   // 2 (n-3)!/n! sum H(i,j1) H(i,j2)
  double quads = 0.0;     // (n-4)!/n! sum over four distinct indices
  double sigma2() const { return pairs - triples + quads; }
};

/// Terms from a symmetric n x n Gram matrix (row-major; the diagonal is ignored).
VarianceTerms variance_terms(std::span<const double> gram, std::size_t n);

/// sigma_hat = sqrt(max(sigma2, 0)). Requires n >= 5.
double variance_estimator(const SampleMatrix& samples, const GofConfig& cfg);

/// ceil((1 - significance) B)-th order statistic of the replicates.
double bootstrap_threshold(std::vector<double> stats, double significance);

struct GofTestRun {
  std::size_t n = 0;
  int dim = 0;
  int level = 0;
  double statistic = 0.0;
  std::vector<double> bootstrap_stats;
  double threshold = 0.0;
  bool reject = false;
  double z_score = 0.0;
  double sigma_hat = 0.0;
  std::uint64_t seed = 0;
};

/// Full procedure: T_n, bootstrap threshold, decision and z = n T_n / (sqrt(2) sigma_hat).
/// The z-score is NaN when n < 5 or sigma_hat == 0.
GofTestRun run_test(const SampleMatrix& samples, const NullDensity& p0, const GofConfig& cfg);

std::string gof_csv_header();
/// n,D,l,T_n,threshold,reject,z_score,sigma_hat,seed
std::string gof_csv_row(const GofTestRun& run);

}  // namespace hxd
