#pragma once

// Reproduction harnesses: RMSE curves, GOF power tables, convergence slopes
// and the empirical-measure gap. Every run is a pure function of its spec.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hxd/baselines.hpp"
#include "hxd/datagen.hpp"
#include "hxd/gof.hpp"
#include "hxd/policy.hpp"

namespace hxd {

enum class ExperimentKind { RmseCurve, PowerTable, SlopeCheck, EmpiricalGap };
enum class EstimatorKind { Ahce, Kde, Bsde };

std::string to_string(ExperimentKind kind);
std::string to_string(EstimatorKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);
EstimatorKind estimator_from_string(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::RmseCurve;
  std::string id = "experiment";
  SyntheticDist dist = Uniform{1};
  std::vector<EstimatorKind> estimators{EstimatorKind::Ahce};
  std::vector<std::size_t> n_grid;
  int replications = 20;
  int eval_points = 1000;
  std::uint64_t seed = 0;

  // AHCE
  BasisKind basis = BasisKind::Fourier;
  SmoothingPolicy policy = Wahba{};
  // KDE: empty scale means the mean coordinate standard deviation
  std::optional<double> kde_scale;
  KdeBandwidthRule kde_rule = KdeBandwidthRule::Standard;

  // power tables: `dist` is the null (product Beta), `alternative` the truth
  std::optional<SyntheticDist> alternative;
  std::vector<int> levels;
  GofConfig gof;  // level and seed are set per cell
  bool include_null_rate = false;

  // empirical gap
  int gap_dim = 2;
  int gap_beta = 1;
};

/// Projection of a synthetic law onto the test's cross (factored; exact for uniform).
NullDensity null_density_for(const SyntheticDist& null, BasisKind basis, int level);

/// Throws std::invalid_argument unless the spec is runnable.
void validate(const ExperimentSpec& spec);

struct ResultRow {
  std::string experiment;
  std::string estimator;
  std::size_t n = 0;
  int level = -1;  // -1 when not applicable
  std::string metric;
  double value = 0.0;
  double stderr_ = 0.0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of log y on log x. Needs >= 2 points, all positive.
LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::optional<LineFit> fit;
};

/// Per n and estimator: median RMSE over replications at uniform evaluation
/// points (metric "rmse"), with the standard error of the mean.
ExperimentResult run_rmse(const ExperimentSpec& spec);

/// Rejection rate under the alternative per (n, level) (metric "power"), and
/// under the null when `include_null_rate` (metric "size").
ExperimentResult run_power_table(const ExperimentSpec& spec);

/// Median L2 error of the AHCE per n (metric "l2") and the log-log fit.
/// Requires >= 3 grid points spanning >= 1.5 decades.
ExperimentResult run_slope_check(const ExperimentSpec& spec);

/// Gap of the disjoint-support B-spline witness per n (metrics "gap",
/// "empirical_term", "witness_count", averaged over replications) and the
/// log-log fit of gap against n.
ExperimentResult run_empirical_gap(int dim, int beta, const std::vector<std::size_t>& n_grid, int replications,
                                   std::uint64_t seed, const std::string& id = "empirical-gap");

ExperimentResult run_experiment(const ExperimentSpec& spec);

// --- empirical gap pieces -----------------------------------------------------

/// k* with 2^{(k*-1)D} <= 2n < 2^{k*D}.
int gap_resolution(std::size_t n, int dim);

struct GapWitness {
  int dim = 0;
  int beta = 0;
  int level = 0;                                  // k*
  std::vector<std::vector<int>> shifts;           // kept s, each of length dim
  double eval(std::span<const double> x) const;   // f*(x) = 2^{-beta k*} sum_s M_{k*,s}(x)
  double integral() const;                        // exact integral of f*
};

/// Family with shifts in {0, beta+1, 2(beta+1), ...}, keeping the members
/// whose open support holds no sample.
GapWitness build_gap_witness(const SampleMatrix& samples, int beta);

// --- configuration and output -------------------------------------------------

/// INI file with a required top-level `schema_version = 1`. See README.
ExperimentSpec load_experiment_spec(const std::string& path);
ExperimentSpec parse_experiment_spec(const std::string& text);

std::string rows_csv(const std::vector<ResultRow>& rows);
/// series,x,y,stderr with one series per (estimator, level, metric).
std::string plot_series_csv(const std::vector<ResultRow>& rows);
std::string summary_text(const ExperimentSpec& spec, const ExperimentResult& result);

}  // namespace hxd
