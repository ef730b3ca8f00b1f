#pragma once

// The adaptive hyperbolic cross estimator: empirical coefficients on a
// cross, smoothed by a policy's multipliers.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hxd/basis.hpp"
#include "hxd/hypercross.hpp"
#include "hxd/policy.hpp"
#include "hxd/sample_matrix.hpp"
#include "hxd/spectral.hpp"

namespace hxd {

/// Fitted estimator. Values are stored densely in the layout of `cross()`.
class AhceModel {
 public:
  AhceModel(std::shared_ptr<const HyperbolicCross> cross, SmoothingPolicy policy, std::size_t n,
            std::vector<double> raw, std::vector<double> multipliers);

  BasisKind basis() const { return cross_->kind(); }
  int dim() const { return cross_->dim(); }
  int level() const { return cross_->level(); }
  std::size_t n() const { return n_; }
  const SmoothingPolicy& policy() const { return policy_; }
  const HyperbolicCross& cross() const { return *cross_; }

  /// (1/n) sum_i phi_s(X_i).
  const std::vector<double>& raw() const { return raw_; }
  /// b_{s,n}.
  const std::vector<double>& multipliers() const { return multipliers_; }
  /// b_{s,n} times the raw coefficient.
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// The smoothed coefficients as a sparse table.
  CoefficientTable table() const;

  std::optional<std::uint64_t> seed;

 private:
  std::shared_ptr<const HyperbolicCross> cross_;
  SmoothingPolicy policy_;
  std::size_t n_;
  std::vector<double> raw_;
  std::vector<double> multipliers_;
  std::vector<double> coeffs_;
};

/// Throws OutOfCubeError for observations outside [0,1]^D and
/// std::invalid_argument for fewer than two rows.
void check_samples(const SampleMatrix& samples);

AhceModel fit(const SampleMatrix& samples, BasisKind basis, const SmoothingPolicy& policy);

double evaluate(const AhceModel& model, Point x);
std::vector<double> evaluate_many(const AhceModel& model, const SampleMatrix& points);

/// sum over the cross of b_s phi_s(x) phi_s(y).
double kernel_form(const AhceModel& model, Point x, Point y);

/// b_s f_s on the model's cross; indices of f outside the cross are dropped.
CoefficientTable smooth_function(const AhceModel& model, const CoefficientTable& f);

/// (sum_s b_s f_s p_s, (1/n) sum_i f~(X_i)): the two sides of the smoothing identity.
std::pair<double, double> smoothing_identity_check(const AhceModel& model, const CoefficientTable& f,
                                                   const SampleMatrix& samples);

/// m draws from max(p~, 0) / Z by rejection from the uniform law. Falls back
/// to a piecewise-constant inverse cdf on 2^{10 min(D,2)} cells when the
/// envelope makes acceptance rarer than 1e-3 (D <= 2 only).
SampleMatrix sample(const AhceModel& model, std::size_t m, std::uint64_t seed);

/// Envelope 1 + sum |c_s| ||phi_s||_inf used by `sample`.
double sampling_envelope(const AhceModel& model);

// --- persistence -------------------------------------------------------------

/// Table CSV at `path` plus metadata at `path + ".json"`.
void save_model(const AhceModel& model, const std::string& path);
AhceModel load_model(const std::string& path);

std::string model_metadata_json(const AhceModel& model);
AhceModel model_from_parts(const CoefficientTable& table, const std::string& metadata_json);

}  // namespace hxd
