#pragma once

// Reference estimators for the RMSE comparison: a product Gaussian kernel
// density estimator and a product B-spline distribution estimator.

#include <optional>
#include <vector>

#include "hxd/basis.hpp"
#include "hxd/sample_matrix.hpp"

namespace hxd {

enum class KdeBandwidthRule {
  Standard,  // scale * n^{-1/(D+4)}
  Literal,   // scale * n^{4/D}, grows with n
};

struct KdeModel {
  SampleMatrix samples;
  double bandwidth = 0.0;
};

/// Mean per-coordinate sample standard deviation.
double default_kde_scale(const SampleMatrix& samples);

KdeModel kde_fit(const SampleMatrix& samples, double bandwidth_scale,
                 KdeBandwidthRule rule = KdeBandwidthRule::Standard);
/// (1 / (n h^D)) sum_i prod_j phi((x_j - X_ij) / h). Not renormalised to the cube.
double kde_eval(const KdeModel& model, Point x);
std::vector<double> kde_eval_many(const KdeModel& model, const SampleMatrix& points);

/// Clamped cubic B-spline F on [0,1] with F(0) = 0, F(1) = 1 and
/// non-decreasing coefficients, so F' >= 0 and integrates to one.
class SplineCdf {
 public:
  SplineCdf(int intervals, std::vector<double> coefficients);

  int intervals() const { return intervals_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double cdf(double x) const;
  double pdf(double x) const;

 private:
  int intervals_;
  std::vector<double> coeffs_;       // intervals + 3
  std::vector<double> deriv_coeffs_;  // quadratic B-spline coefficients of F'
};

struct BsdeModel {
  std::vector<SplineCdf> margins;
};

/// Least-squares cubic spline fit of each coordinate's empirical cdf on
/// ceil(sqrt(n)) uniform intervals (or `intervals`). Requires n >= 4 and
/// observations in the cube; throws std::invalid_argument on a constant coordinate.
BsdeModel bsde_fit(const SampleMatrix& samples, std::optional<int> intervals = std::nullopt);
double bsde_eval(const BsdeModel& model, Point x);
std::vector<double> bsde_eval_many(const BsdeModel& model, const SampleMatrix& points);

}  // namespace hxd
