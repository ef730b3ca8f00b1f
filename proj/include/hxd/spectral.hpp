#pragma once

// Coefficient tables over hyperbolic crosses and the algebra on them:
// mixed Sobolev norms, the Sobolev-ball IPM, projection of known functions,
// discriminator smoothing and series evaluation.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hxd/basis.hpp"
#include "hxd/hypercross.hpp"
#include "hxd/policy.hpp"

namespace hxd {

struct CoefficientEntry {
  MultiIndex k;
  FrequencyIndex s;
  double value = 0.0;
};

/// Immutable sparse map (k, s) -> coefficient, kept in canonical order
/// (k lexicographic, then s lexicographic).
class CoefficientTable {
 public:
  CoefficientTable(BasisKind basis, int dim, int level, std::vector<CoefficientEntry> entries);

  /// Table holding every index of `cross`, values in the cross's flat layout.
  static CoefficientTable from_dense(const HyperbolicCross& cross, std::span<const double> values);

  BasisKind basis() const { return basis_; }
  int dim() const { return dim_; }
  int level() const { return level_; }
  std::size_t size() const { return entries_.size(); }
  std::span<const CoefficientEntry> entries() const { return entries_; }

  /// Coefficient at (k, s); zero when absent.
  double value(const MultiIndex& k, const FrequencyIndex& s) const;
  /// Values laid out on `cross` (absent indices are zero, entries outside the cross are dropped).
  std::vector<double> to_dense(const HyperbolicCross& cross) const;

  /// this - other over the union of supports, level = max of both.
  CoefficientTable minus(const CoefficientTable& other) const;
  CoefficientTable scaled(double factor) const;
  /// Entries with b(k, s) * c; entries with b == 0 are removed.
  CoefficientTable multiplied(const std::function<double(const MultiIndex&, const FrequencyIndex&)>& b) const;

 private:
  BasisKind basis_;
  int dim_;
  int level_;
  std::vector<CoefficientEntry> entries_;
};

/// ( sum_k 2^{2 r |k|} sum_s c_{k,s}^2 )^{1/2}; requires r >= 0.
double mixed_sobolev_norm(const CoefficientTable& t, double r);
/// Same weighting with any real exponent (used for the dual norm).
double weighted_block_norm(const CoefficientTable& t, double r);

/// Supremum of E_a f - E_b f over the ball ||f||_{H^beta_mix} <= L on the
/// represented frequencies: L * weighted_block_norm(a - b, -beta).
double ipm_sobolev_ball(const CoefficientTable& a, const CoefficientTable& b, double beta, double radius);

/// Finite series value at x.
double eval_table(const CoefficientTable& t, Point x);

// --- projection ------------------------------------------------------------

using Function = std::function<double(Point)>;

/// Composite Gauss-Legendre rule on [0,1] with `panels` equal panels of
/// `per_panel` points each.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int points);  // on [-1,1]
QuadratureRule composite_gauss_legendre(int panels, int per_panel);

/// Default per-dimension node count max(64, 4 * 2^l).
int default_quad_nodes(int level);

/// Coefficients of f on the cross of `level` by tensor quadrature. For the
/// Haar basis the panels are aligned with the finest dyadic cells, which
/// makes the integration exact for piecewise polynomials on that grid. The
/// Fourier rule uses 16-point panels, at least 2^level of them.
/// Throws when quad_nodes < 2^level.
CoefficientTable project(const Function& f, int dim, BasisKind basis, int level, int quad_nodes);

/// One-dimensional density with an optional distribution function.
struct Marginal1d {
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;  // empty when not available
};

/// 1-D coefficients grouped by level, each level in block order.
struct Coefficients1d {
  BasisKind basis = BasisKind::Fourier;
  int level = 0;
  std::vector<std::vector<double>> by_level;
};

/// 1-D projection. Haar with a cdf is exact (differences of the cdf at
/// dyadic points); otherwise composite Gauss-Legendre on the dyadic grid.
Coefficients1d project_1d(const Marginal1d& m, BasisKind basis, int level, int quad_nodes);

/// Product density prod_j m_j(x_j): per-dimension coefficients, kept factored.
class ProductCoefficients {
 public:
  ProductCoefficients(BasisKind basis, int level, std::vector<std::shared_ptr<const Coefficients1d>> factors);

  BasisKind basis() const { return basis_; }
  int level() const { return level_; }
  int dim() const { return static_cast<int>(factors_.size()); }
  const Coefficients1d& factor(int j) const { return *factors_[static_cast<std::size_t>(j)]; }

  /// sum_s phi_{k,s}(x) c_{k,s} for the 1-D factor j at level k.
  double level_mean(int j, int k, double x) const;
  /// sum_s c_{k,s}^2 for factor j at level k.
  double level_energy(int j, int k) const { return energy_[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]; }

  /// Explicit tensor table (only for crosses small enough to enumerate).
  CoefficientTable to_table() const;

 private:
  BasisKind basis_;
  int level_;
  std::vector<std::shared_ptr<const Coefficients1d>> factors_;
  std::vector<std::vector<double>> energy_;
};

/// Projection of a product density with per-dimension 1-D quadrature.
/// Marginals with equal `share_keys` entries share one set of 1-D coefficients.
ProductCoefficients project_product(const std::vector<Marginal1d>& marginals, BasisKind basis, int level,
                                    int quad_nodes, const std::vector<std::string>& share_keys = {});

// --- smoothing ---------------------------------------------------------------

/// Entries b_{k,s} * f_{k,s} for a policy with a global constant; entries
/// with |k| above the policy level are dropped. Wahba without a global
/// constant needs per-index variances, so use the model overload in ahce.hpp.
CoefficientTable smooth_function(const CoefficientTable& f, const SmoothingPolicy& policy, std::size_t n);

// --- CSV layout ------------------------------------------------------------

/// Line 1 `dim,level,basis`; line 2 their values; then one row per entry:
/// k_1..k_D,s_1..s_D,coeff in canonical order.
void write_table_csv(std::ostream& out, const CoefficientTable& t);
CoefficientTable read_table_csv(std::istream& in);

}  // namespace hxd
