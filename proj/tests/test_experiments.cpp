#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hxd/ahce.hpp"
#include "hxd/experiments.hpp"
#include "hxd/parallel.hpp"
#include "hxd/spectral.hpp"

using namespace hxd;

namespace {

const ResultRow& find_row(const std::vector<ResultRow>& rows, const std::string& est, std::size_t n, const std::string& metric,
                          int level = -1) {
  for (const auto& r : rows)
    if (r.estimator == est && r.n == n && r.metric == metric && r.level == level) return r;
  throw std::runtime_error("row not found: " + est + " " + metric);
}

}  // namespace

TEST(LogLogFit, RecoversPowerLaw) {
  const std::vector<double> x{10, 100, 1000, 5000};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.4));
  const auto f = loglog_fit(x, y);
  EXPECT_NEAR(f.slope, -0.4, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_THROW(loglog_fit({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(loglog_fit({1.0, 2.0}, {1.0, -1.0}), std::invalid_argument);
}

TEST(EmpiricalGap, Resolution) {
  for (int dim = 1; dim <= 4; ++dim)
    for (std::size_t n : {1u, 3u, 8u, 64u, 100u, 1000u, 4096u}) {
      const int k = gap_resolution(n, dim);
      EXPECT_GE(k, 1);
      EXPECT_LE(std::ldexp(1.0, (k - 1) * dim), 2.0 * n);
      EXPECT_LT(2.0 * n, std::ldexp(1.0, k * dim));
    }
}

TEST(EmpiricalGap, CardinalBsplines) {
  for (double t : {-0.5, 0.0, 0.3, 0.99, 1.0, 1.7, 2.0, 2.5}) {
    EXPECT_DOUBLE_EQ(cardinal_bspline(0, t), (t >= 0.0 && t < 1.0) ? 1.0 : 0.0);
    const double hat = t < 0.0 || t >= 2.0 ? 0.0 : (t < 1.0 ? t : 2.0 - t);
    EXPECT_NEAR(cardinal_bspline(1, t), hat, 1e-15) << t;
    double quad = 0.0;
    if (t >= 0.0 && t < 1.0) quad = 0.5 * t * t;
    else if (t >= 1.0 && t < 2.0) quad = 0.5 * (-2.0 * t * t + 6.0 * t - 3.0);
    else if (t >= 2.0 && t < 3.0) quad = 0.5 * (3.0 - t) * (3.0 - t);
    EXPECT_NEAR(cardinal_bspline(2, t), quad, 1e-15) << t;
  }
  // unit mass by the midpoint rule, exact enough for piecewise polynomials on a fine grid
  for (int beta = 0; beta <= 3; ++beta) {
    double s = 0.0;
    const int m = 40000;
    for (int i = 0; i < m; ++i) s += cardinal_bspline(beta, (beta + 1) * (i + 0.5) / m) * (beta + 1) / m;
    EXPECT_NEAR(s, 1.0, 1e-8);
  }
}

TEST(EmpiricalGap, WitnessMatchesBruteForce) {
  for (int beta : {0, 1, 2}) {
    const auto samples = draw(Uniform{2}, 40, 5 + beta);
    const auto w = build_gap_witness(samples, beta);
    const int k = gap_resolution(40, 2);
    ASSERT_EQ(w.level, k);
    // brute force: every member of the disjoint family, kept iff zero on all samples
    std::set<std::vector<int>> expected;
    const int step = beta + 1;
    for (int s0 = 0; s0 + step <= (1 << k); s0 += step)
      for (int s1 = 0; s1 + step <= (1 << k); s1 += step) {
        bool zero = true;
        for (std::size_t i = 0; i < samples.rows() && zero; ++i) {
          const double v = cardinal_bspline(beta, std::ldexp(samples(i, 0), k) - s0) *
                           cardinal_bspline(beta, std::ldexp(samples(i, 1), k) - s1);
          zero = v == 0.0;
        }
        if (zero) expected.insert({s0, s1});
      }
    const std::set<std::vector<int>> got(w.shifts.begin(), w.shifts.end());
    EXPECT_EQ(got, expected) << "beta " << beta;
    for (std::size_t i = 0; i < samples.rows(); ++i) EXPECT_EQ(w.eval(samples.row(i)), 0.0);

    // integral by 2-point Gauss per 2^-k cell: exact for these piecewise polynomials
    const int cells = 1 << k;
    const double g = 0.5 / std::sqrt(3.0);
    std::vector<double> nodes;
    for (int c = 0; c < cells; ++c)
      for (double o : {-g, g}) nodes.push_back((c + 0.5 + o) / cells);
    double total = 0.0;
    std::vector<double> x(2);
    for (double a : nodes)
      for (double b : nodes) {
        x[0] = a;
        x[1] = b;
        total += w.eval(x);
      }
    total /= 4.0 * cells * cells;
    EXPECT_NEAR(total, w.integral(), 1e-14);
    EXPECT_GT(w.integral(), 0.0);
  }
}

TEST(EmpiricalGap, RateInTwoDimensions) {
  const auto res = run_empirical_gap(2, 1, {64, 256, 1024, 4096}, 10, 2024);
  for (std::size_t n : {64u, 256u, 1024u, 4096u}) {
    EXPECT_EQ(find_row(res.rows, "witness", n, "empirical_term", gap_resolution(n, 2)).value, 0.0);
    EXPECT_GT(find_row(res.rows, "witness", n, "gap", gap_resolution(n, 2)).value, 0.0);
  }
  ASSERT_TRUE(res.fit.has_value());
  EXPECT_NEAR(res.fit->slope, -0.5, 0.2);
}

TEST(EmpiricalGap, Errors) {
  EXPECT_THROW(run_empirical_gap(2, -1, {64}, 1, 1), std::invalid_argument);
  EXPECT_THROW(run_empirical_gap(2, 1, {256, 64}, 1, 1), std::invalid_argument);
  EXPECT_THROW(run_empirical_gap(1, 7, {1}, 1, 1), std::invalid_argument);
}

TEST(Rmse, UniformTruthMatchesNoiseFormula) {
  // with a fixed variance constant the multipliers are deterministic and
  // E||p~ - 1||^2 = sum_{s != 0} b_s^2 / n under the uniform law
  ExperimentSpec spec;
  spec.kind = ExperimentKind::RmseCurve;
  spec.dist = Uniform{1};
  spec.n_grid = {2000};
  spec.replications = 40;
  spec.eval_points = 4000;
  spec.seed = 3;
  spec.policy = Wahba{1.0, 1.0, 6};
  const auto res = run_rmse(spec);
  const double median_rmse = find_row(res.rows, "ahce", 2000, "rmse").value;

  const auto model = fit(draw(Uniform{1}, 2000, 1), BasisKind::Fourier, spec.policy);
  double noise = 0.0;
  for (std::size_t i = 1; i < model.multipliers().size(); ++i) noise += model.multipliers()[i] * model.multipliers()[i];
  noise /= 2000.0;
  EXPECT_NEAR(median_rmse, std::sqrt(noise), 0.2 * std::sqrt(noise));
}

TEST(Rmse, DeterministicAcrossThreadCounts) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::RmseCurve;
  spec.dist = ProductBeta{{2.0, 5.0}, {5.0, 2.0}};
  spec.estimators = {EstimatorKind::Ahce, EstimatorKind::Kde, EstimatorKind::Bsde};
  spec.n_grid = {100, 300};
  spec.replications = 3;
  spec.eval_points = 200;
  spec.seed = 17;
  set_thread_count(1);
  const auto a = rows_csv(run_rmse(spec).rows);
  set_thread_count(3);
  const auto b = rows_csv(run_rmse(spec).rows);
  set_thread_count(0);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("bsde"), std::string::npos);
}

TEST(PowerTable, StrongAlternativeAndCalibratedNull) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::PowerTable;
  spec.dist = Uniform{1};
  spec.alternative = ProductBeta{{5.0}, {5.0}};
  spec.levels = {2, 3};
  spec.n_grid = {100};
  spec.replications = 40;
  spec.gof.bootstrap_reps = 200;
  spec.include_null_rate = true;
  spec.seed = 5;
  const auto res = run_power_table(spec);
  ASSERT_EQ(res.rows.size(), 4u);
  for (int l : {2, 3}) {
    EXPECT_GE(find_row(res.rows, "gof", 100, "power", l).value, 0.95);
    EXPECT_LE(find_row(res.rows, "gof", 100, "size", l).value, 0.2);
  }
  set_thread_count(2);
  const auto again = run_power_table(spec);
  set_thread_count(0);
  EXPECT_EQ(rows_csv(res.rows), rows_csv(again.rows));
}

TEST(PowerTable, HigherLevelLosesPower) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::PowerTable;
  spec.dist = ProductBeta{{2, 2}, {2, 5}};
  spec.alternative = BetaPlusUniform{{2, 2}, {2, 5}};
  spec.levels = {4, 16};
  spec.n_grid = {100};
  spec.replications = 40;
  spec.gof.bootstrap_reps = 200;
  spec.seed = 12;
  const auto res = run_power_table(spec);
  EXPECT_GE(find_row(res.rows, "gof", 100, "power", 4).value, find_row(res.rows, "gof", 100, "power", 16).value - 0.05);
}

TEST(SlopeCheck, ConstantTruthHasMonteCarloRate) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::SlopeCheck;
  spec.dist = Uniform{1};
  spec.n_grid = {200, 1000, 5000, 25000};
  spec.replications = 20;
  spec.policy = Wahba{1.0, 0.0, 4};  // unit multipliers on a fixed cross: error^2 = 31 / n on average
  const auto res = run_slope_check(spec);
  ASSERT_TRUE(res.fit.has_value());
  EXPECT_NEAR(res.fit->slope, -0.5, 0.05);
  EXPECT_GE(res.fit->r_squared, 0.95);
}

TEST(SlopeCheck, Preconditions) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::SlopeCheck;
  spec.n_grid = {100, 1000};
  EXPECT_THROW(run_slope_check(spec), std::invalid_argument);
  spec.n_grid = {100, 200, 400};
  EXPECT_THROW(run_slope_check(spec), std::invalid_argument);
}

TEST(Config, ParsesFullSpec) {
  const auto spec = parse_experiment_spec(R"(
schema_version = 1
[experiment]
kind = power
id = table2
seed = 11
replications = 30
n_grid = 50, 100
[dist]
type = product-beta
a = 2,2
b = 2,5
[alternative]
type = beta-plus-uniform
a = 2,2
b = 2,5
shift = 0.2
[gof]
levels = 4,10,16
bootstrap_reps = 500
include_null_rate = true
)");
  EXPECT_EQ(spec.kind, ExperimentKind::PowerTable);
  EXPECT_EQ(spec.id, "table2");
  EXPECT_EQ(spec.seed, 11u);
  EXPECT_EQ(spec.replications, 30);
  EXPECT_EQ(spec.n_grid, (std::vector<std::size_t>{50, 100}));
  EXPECT_EQ(spec.levels, (std::vector<int>{4, 10, 16}));
  EXPECT_EQ(spec.gof.bootstrap_reps, 500);
  EXPECT_TRUE(spec.include_null_rate);
  const auto& alt = std::get<BetaPlusUniform>(*spec.alternative);
  EXPECT_EQ(alt.b, (std::vector<double>{2.0, 5.0}));
  EXPECT_EQ(alt.boundary, BetaPlusUniform::Boundary::Clamp);
}

TEST(Config, RmseSpecWithPolicy) {
  const auto spec = parse_experiment_spec(R"(
schema_version = 1
[experiment]
kind = rmse
n_grid = 200,400
estimators = ahce,kde
[dist]
type = uniform
dim = 3
[ahce]
basis = haar
policy = truncation-wavelet
alpha = 2
scale_c = 0.5
[kde]
scale = 0.3
rule = literal
)");
  EXPECT_EQ(spec.estimators.size(), 2u);
  EXPECT_EQ(spec.basis, BasisKind::HaarWavelet);
  const auto& p = std::get<TruncationWavelet>(spec.policy);
  EXPECT_EQ(p.alpha, 2.0);
  EXPECT_EQ(p.scale_c, 0.5);
  EXPECT_EQ(*spec.kde_scale, 0.3);
  EXPECT_EQ(spec.kde_rule, KdeBandwidthRule::Literal);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_experiment_spec("[experiment]\nkind = rmse\nn_grid = 10\n"), std::invalid_argument);
  EXPECT_THROW(parse_experiment_spec("schema_version = 2\n[experiment]\nn_grid = 10\n[dist]\ntype=uniform\ndim=1\n"),
               std::invalid_argument);
  EXPECT_THROW(parse_experiment_spec("schema_version = 1\n[experiment]\nn_grid = 10\nbogus = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_experiment_spec("schema_version = 1\n[experiment]\nn_grid = 10, x\n"), std::invalid_argument);
  EXPECT_THROW(parse_experiment_spec("schema_version = 1\n[experiment]\nn_grid = 20, 10\n[dist]\ntype=uniform\ndim=1\n"),
               std::invalid_argument);
  EXPECT_THROW(parse_experiment_spec("schema_version = 1\n[experiment]\nkind = power\nn_grid = 10\n[dist]\ntype=uniform\ndim=1\n"),
               std::invalid_argument);
}

TEST(Output, CsvLayouts) {
  const std::vector<ResultRow> rows{{"e", "kde", 200, -1, "rmse", 0.5, 0.01}, {"e", "gof", 50, 4, "power", 0.25, 0.04},
                                    {"e", "ahce", 0, -1, "slope", -0.3, 0.0}};
  EXPECT_EQ(rows_csv(rows),
            "experiment,estimator,n,level,metric,value,stderr\n"
            "e,kde,200,,rmse,0.5,0.01\n"
            "e,gof,50,4,power,0.25,0.040000000000000001\n"
            "e,ahce,0,,slope,-0.29999999999999999,0\n");
  EXPECT_EQ(plot_series_csv(rows),
            "series,x,y,stderr\n"
            "kde:rmse,200,0.5,0.01\n"
            "gof:power:l=4,50,0.25,0.040000000000000001\n");
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"power_d2", "power_d6", "rmse_5d", "slope", "gap"}) {
    const auto spec = load_experiment_spec(std::string(HXD_CONFIG_DIR) + "/" + name + ".ini");
    EXPECT_EQ(spec.id, name);
  }
}
