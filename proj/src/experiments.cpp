#include "hxd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hxd/ahce.hpp"
#include "hxd/io.hpp"
#include "hxd/parallel.hpp"
#include "hxd/rng.hpp"
#include "hxd/spectral.hpp"

namespace hxd {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) / static_cast<double>(v.size()));
}

void check_grid(const std::vector<std::size_t>& grid) {
  if (grid.empty()) throw std::invalid_argument("n_grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2) throw std::invalid_argument("n_grid entries must be >= 2");
    if (i > 0 && grid[i] <= grid[i - 1]) throw std::invalid_argument("n_grid must be strictly increasing");
  }
}

std::vector<double> estimate(EstimatorKind e, const ExperimentSpec& spec, const SampleMatrix& data,
                             const SampleMatrix& points) {
  switch (e) {
    case EstimatorKind::Ahce:
      return evaluate_many(fit(data, spec.basis, spec.policy), points);
    case EstimatorKind::Kde:
      return kde_eval_many(kde_fit(data, spec.kde_scale.value_or(default_kde_scale(data)), spec.kde_rule), points);
    case EstimatorKind::Bsde:
      return bsde_eval_many(bsde_fit(data), points);
  }
  throw std::logic_error("unknown estimator");
}

double rmse_against(const SyntheticDist& dist, const SampleMatrix& points, const std::vector<double>& est) {
  double ss = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const double d = est[i] - density(dist, points.row(i));
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(points.rows()));
}

// L2 error on the cube: tensor Gauss-Legendre for D <= 2, Monte Carlo beyond.
double l2_error(const AhceModel& model, const SyntheticDist& dist, int eval_points, std::uint64_t seed) {
  const int dim = model.dim();
  if (dim <= 2) {
    const QuadratureRule rule = composite_gauss_legendre(dim == 1 ? 256 : 32, 16);
    const std::size_t q = rule.nodes.size();
    double total = 0.0;
    std::vector<double> x(static_cast<std::size_t>(dim));
    const std::size_t count = dim == 1 ? q : q * q;
    for (std::size_t idx = 0; idx < count; ++idx) {
      const std::size_t i = idx % q, j = idx / q;
      x[0] = rule.nodes[i];
      double w = rule.weights[i];
      if (dim == 2) {
        x[1] = rule.nodes[j];
        w *= rule.weights[j];
      }
      const double d = evaluate(model, x) - density(dist, x);
      total += w * d * d;
    }
    return std::sqrt(total);
  }
  const auto points = draw(Uniform{dim}, static_cast<std::size_t>(eval_points), seed);
  return rmse_against(dist, points, evaluate_many(model, points));
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::RmseCurve: return "rmse";
    case ExperimentKind::PowerTable: return "power";
    case ExperimentKind::SlopeCheck: return "slope";
    case ExperimentKind::EmpiricalGap: return "gap";
  }
  return "?";
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Ahce: return "ahce";
    case EstimatorKind::Kde: return "kde";
    case EstimatorKind::Bsde: return "bsde";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "rmse") return ExperimentKind::RmseCurve;
  if (name == "power") return ExperimentKind::PowerTable;
  if (name == "slope") return ExperimentKind::SlopeCheck;
  if (name == "gap") return ExperimentKind::EmpiricalGap;
  throw std::invalid_argument("unknown experiment kind '" + name + "' (rmse, power, slope, gap)");
}

EstimatorKind estimator_from_string(const std::string& name) {
  if (name == "ahce") return EstimatorKind::Ahce;
  if (name == "kde") return EstimatorKind::Kde;
  if (name == "bsde") return EstimatorKind::Bsde;
  throw std::invalid_argument("unknown estimator '" + name + "' (ahce, kde, bsde)");
}

void validate(const ExperimentSpec& spec) {
  if (spec.replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (spec.kind == ExperimentKind::EmpiricalGap) {
    check_grid(spec.n_grid);
    if (spec.gap_dim < 1) throw std::invalid_argument("gap dimension must be >= 1");
    if (spec.gap_beta < 0) throw std::invalid_argument("gap beta must be >= 0");
    return;
  }
  validate(spec.dist);
  check_grid(spec.n_grid);
  if (spec.eval_points < 1) throw std::invalid_argument("eval_points must be >= 1");
  if (spec.kind == ExperimentKind::RmseCurve && spec.estimators.empty())
    throw std::invalid_argument("at least one estimator is required");
  if (spec.kind == ExperimentKind::PowerTable) {
    if (!spec.alternative) throw std::invalid_argument("power table needs an alternative distribution");
    validate(*spec.alternative);
    if (dist_dim(*spec.alternative) != dist_dim(spec.dist))
      throw std::invalid_argument("null and alternative dimensions differ");
    if (spec.levels.empty()) throw std::invalid_argument("power table needs at least one level");
    for (int l : spec.levels)
      if (l < 0) throw std::invalid_argument("levels must be >= 0");
  }
  if (spec.kind == ExperimentKind::SlopeCheck) {
    if (spec.n_grid.size() < 3) throw std::invalid_argument("slope check needs at least 3 grid points");
    const double decades = std::log10(static_cast<double>(spec.n_grid.back()) / static_cast<double>(spec.n_grid.front()));
    if (decades < 1.5) throw std::invalid_argument("slope check grid must span at least 1.5 decades");
  }
}

LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_fit: need >= 2 paired points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("loglog_fit: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = mean(lx), my = mean(ly);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_fit: x values are all equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

ExperimentResult run_rmse(const ExperimentSpec& spec) {
  validate(spec);
  const std::size_t reps = static_cast<std::size_t>(spec.replications);
  const std::size_t cells = spec.n_grid.size() * reps;
  const std::size_t est_count = spec.estimators.size();
  std::vector<double> rmse(cells * est_count);
  parallel_for(cells, [&](std::size_t c) {
    const std::size_t n = spec.n_grid[c / reps];
    const auto data = draw(spec.dist, n, derive_seed(spec.seed, 2 * c));
    const auto points = draw(Uniform{dist_dim(spec.dist)}, static_cast<std::size_t>(spec.eval_points),
                             derive_seed(spec.seed, 2 * c + 1));
    for (std::size_t e = 0; e < est_count; ++e)
      rmse[c * est_count + e] = rmse_against(spec.dist, points, estimate(spec.estimators[e], spec, data, points));
  });
  ExperimentResult out;
  for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni)
    for (std::size_t e = 0; e < est_count; ++e) {
      std::vector<double> v;
      for (std::size_t r = 0; r < reps; ++r) v.push_back(rmse[(ni * reps + r) * est_count + e]);
      out.rows.push_back({spec.id, to_string(spec.estimators[e]), spec.n_grid[ni], -1, "rmse", median(v), standard_error(v)});
    }
  return out;
}

ExperimentResult run_power_table(const ExperimentSpec& spec) {
  validate(spec);
  const std::size_t reps = static_cast<std::size_t>(spec.replications);
  const std::size_t nl = spec.levels.size();
  std::vector<NullDensity> nulls;
  for (int l : spec.levels) nulls.push_back(null_density_for(spec.dist, spec.gof.basis, l));

  const std::size_t cells = spec.n_grid.size() * nl * reps;
  std::vector<char> reject_alt(cells, 0), reject_null(cells, 0);
  parallel_for(cells, [&](std::size_t c) {
    const std::size_t r = c % reps;
    const std::size_t li = (c / reps) % nl;
    const std::size_t ni = c / (reps * nl);
    const std::size_t n = spec.n_grid[ni];
    GofConfig cfg = spec.gof;
    cfg.level = spec.levels[li];
    cfg.seed = derive_seed(spec.seed, 4 * c);
    // the same data for every level of a replicate
    const std::size_t data_index = ni * reps + r;
    const auto alt = draw(*spec.alternative, n, derive_seed(spec.seed ^ 0xa17e, data_index));
    reject_alt[c] = run_test(alt, nulls[li], cfg).reject;
    if (spec.include_null_rate) {
      cfg.seed = derive_seed(spec.seed, 4 * c + 1);
      const auto null = draw(spec.dist, n, derive_seed(spec.seed ^ 0x9011, data_index));
      reject_null[c] = run_test(null, nulls[li], cfg).reject;
    }
  });
  ExperimentResult out;
  const double R = static_cast<double>(reps);
  for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni)
    for (std::size_t li = 0; li < nl; ++li) {
      std::size_t alt = 0, null = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const std::size_t c = (ni * nl + li) * reps + r;
        alt += static_cast<std::size_t>(reject_alt[c]);
        null += static_cast<std::size_t>(reject_null[c]);
      }
      const double p = static_cast<double>(alt) / R;
      out.rows.push_back({spec.id, "gof", spec.n_grid[ni], spec.levels[li], "power", p, std::sqrt(p * (1.0 - p) / R)});
      if (spec.include_null_rate) {
        const double q = static_cast<double>(null) / R;
        out.rows.push_back({spec.id, "gof", spec.n_grid[ni], spec.levels[li], "size", q, std::sqrt(q * (1.0 - q) / R)});
      }
    }
  return out;
}

ExperimentResult run_slope_check(const ExperimentSpec& spec) {
  validate(spec);
  const std::size_t reps = static_cast<std::size_t>(spec.replications);
  const std::size_t cells = spec.n_grid.size() * reps;
  std::vector<double> err(cells);
  parallel_for(cells, [&](std::size_t c) {
    const std::size_t n = spec.n_grid[c / reps];
    const auto data = draw(spec.dist, n, derive_seed(spec.seed, 2 * c));
    const auto model = fit(data, spec.basis, spec.policy);
    err[c] = l2_error(model, spec.dist, spec.eval_points, derive_seed(spec.seed, 2 * c + 1));
  });
  ExperimentResult out;
  std::vector<double> xs, ys;
  for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
    std::vector<double> v(err.begin() + static_cast<std::ptrdiff_t>(ni * reps),
                          err.begin() + static_cast<std::ptrdiff_t>((ni + 1) * reps));
    const double m = median(v);
    out.rows.push_back({spec.id, "ahce", spec.n_grid[ni], -1, "l2", m, standard_error(v)});
    xs.push_back(static_cast<double>(spec.n_grid[ni]));
    ys.push_back(m);
  }
  out.fit = loglog_fit(xs, ys);
  out.rows.push_back({spec.id, "ahce", 0, -1, "slope", out.fit->slope, 0.0});
  out.rows.push_back({spec.id, "ahce", 0, -1, "r_squared", out.fit->r_squared, 0.0});
  return out;
}

// --- empirical gap -------------------------------------------------------------

int gap_resolution(std::size_t n, int dim) {
  if (dim < 1) throw std::invalid_argument("gap_resolution: dimension must be >= 1");
  if (n < 1) throw std::invalid_argument("gap_resolution: n must be >= 1");
  const double two_n = 2.0 * static_cast<double>(n);
  int k = 1;
  while (std::ldexp(1.0, k * dim) <= two_n) ++k;
  return k;
}

double GapWitness::eval(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& s : shifts) total += eval_bspline(BSplineSpec{beta, level, s}, x);
  return std::ldexp(total, -beta * level);
}

double GapWitness::integral() const {
  // each member integrates to 2^{-k D}
  return std::ldexp(static_cast<double>(shifts.size()), -beta * level - level * dim);
}

GapWitness build_gap_witness(const SampleMatrix& samples, int beta) {
  if (beta < 0) throw std::invalid_argument("gap witness: beta must be >= 0");
  const int dim = static_cast<int>(samples.dim());
  GapWitness w;
  w.dim = dim;
  w.beta = beta;
  w.level = gap_resolution(samples.rows(), dim);
  const long cells = 1L << w.level;
  const long step = beta + 1;
  const long per_dim = cells / step;  // s in {0, step, ...} with s + step <= 2^k
  if (per_dim < 1) throw std::invalid_argument("gap witness: n too small for the support width");
  long total = 1;
  for (int j = 0; j < dim; ++j) total *= per_dim;
  // a sample removes the one member that can be non-zero at it
  std::vector<char> occupied(static_cast<std::size_t>(total), 0);
  const double scale = std::ldexp(1.0, w.level);
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    long index = 0;
    double value = 1.0;
    for (int j = 0; j < dim; ++j) {
      const double t = scale * samples(i, static_cast<std::size_t>(j));
      const long box = static_cast<long>(std::floor(t / static_cast<double>(step)));
      if (box >= per_dim) {
        value = 0.0;
        break;
      }
      value *= cardinal_bspline(beta, t - static_cast<double>(box * step));
      index = index * per_dim + box;
    }
    if (value != 0.0) occupied[static_cast<std::size_t>(index)] = 1;
  }
  for (long index = 0; index < total; ++index) {
    if (occupied[static_cast<std::size_t>(index)]) continue;
    std::vector<int> s(static_cast<std::size_t>(dim));
    long rest = index;
    for (int j = dim - 1; j >= 0; --j) {
      s[static_cast<std::size_t>(j)] = static_cast<int>((rest % per_dim) * step);
      rest /= per_dim;
    }
    w.shifts.push_back(std::move(s));
  }
  return w;
}

ExperimentResult run_empirical_gap(int dim, int beta, const std::vector<std::size_t>& n_grid, int replications,
                                   std::uint64_t seed, const std::string& id) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::EmpiricalGap;
  spec.n_grid = n_grid;
  spec.replications = replications;
  spec.gap_dim = dim;
  spec.gap_beta = beta;
  validate(spec);
  for (std::size_t n : n_grid)
    if (static_cast<long>(1L << gap_resolution(n, dim)) < beta + 1)
      throw std::invalid_argument("empirical gap: n too small for the witness support");

  const std::size_t reps = static_cast<std::size_t>(replications);
  const std::size_t cells = n_grid.size() * reps;
  std::vector<double> gap(cells), empirical(cells), count(cells);
  parallel_for(cells, [&](std::size_t c) {
    const auto samples = draw(Uniform{dim}, n_grid[c / reps], derive_seed(seed, c));
    const auto w = build_gap_witness(samples, beta);
    double emp = 0.0;
    for (std::size_t i = 0; i < samples.rows(); ++i) emp += w.eval(samples.row(i));
    emp /= static_cast<double>(samples.rows());
    empirical[c] = emp;
    gap[c] = w.integral() - emp;
    count[c] = static_cast<double>(w.shifts.size());
  });
  ExperimentResult out;
  std::vector<double> xs, ys;
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    auto slice = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(ni * reps),
                                 v.begin() + static_cast<std::ptrdiff_t>((ni + 1) * reps));
    };
    const auto g = slice(gap), e = slice(empirical), k = slice(count);
    const int level = gap_resolution(n_grid[ni], dim);
    out.rows.push_back({id, "witness", n_grid[ni], level, "gap", mean(g), standard_error(g)});
    double emax = 0.0;
    for (double v : e) emax = std::max(emax, std::abs(v));
    out.rows.push_back({id, "witness", n_grid[ni], level, "empirical_term", emax, 0.0});
    out.rows.push_back({id, "witness", n_grid[ni], level, "witness_count", mean(k), standard_error(k)});
    xs.push_back(static_cast<double>(n_grid[ni]));
    ys.push_back(mean(g));
  }
  if (n_grid.size() >= 2) {
    out.fit = loglog_fit(xs, ys);
    out.rows.push_back({id, "witness", 0, -1, "slope", out.fit->slope, 0.0});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::RmseCurve: return run_rmse(spec);
    case ExperimentKind::PowerTable: return run_power_table(spec);
    case ExperimentKind::SlopeCheck: return run_slope_check(spec);
    case ExperimentKind::EmpiricalGap:
      return run_empirical_gap(spec.gap_dim, spec.gap_beta, spec.n_grid, spec.replications, spec.seed, spec.id);
  }
  throw std::logic_error("unknown experiment kind");
}

// --- configuration ---------------------------------------------------------------

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
  return x;
}

std::vector<double> doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(key, s));
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: " + key + " expects true or false, got '" + v + "'");
}

void check_keys(const pt::ptree& section, const std::string& name, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : section) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw std::invalid_argument("config: unknown key '" + key + "' in [" + name + "]");
  }
}

SyntheticDist parse_dist(const pt::ptree& s, const std::string& name) {
  check_keys(s, name, {"type", "a", "b", "shift", "dof", "dim", "boundary"});
  const std::string type = s.get<std::string>("type", "");
  auto get = [&](const char* key) -> std::string {
    auto v = s.get_optional<std::string>(key);
    if (!v) throw std::invalid_argument("config: [" + name + "] needs '" + key + "'");
    return *v;
  };
  if (type == "product-beta") return ProductBeta{doubles("a", get("a")), doubles("b", get("b"))};
  if (type == "beta-plus-uniform") {
    BetaPlusUniform d{doubles("a", get("a")), doubles("b", get("b")), to_double("shift", s.get<std::string>("shift", "0.2"))};
    const std::string boundary = s.get<std::string>("boundary", "clamp");
    if (boundary == "clamp") d.boundary = BetaPlusUniform::Boundary::Clamp;
    else if (boundary == "truncate") d.boundary = BetaPlusUniform::Boundary::Truncate;
    else throw std::invalid_argument("config: boundary must be clamp or truncate");
    return d;
  }
  if (type == "t-mapped")
    return StudentTMapped{to_double("dof", get("dof")), static_cast<int>(to_integer("dim", get("dim")))};
  if (type == "uniform") return Uniform{static_cast<int>(to_integer("dim", get("dim")))};
  throw std::invalid_argument("config: [" + name + "] type must be product-beta, beta-plus-uniform, t-mapped or uniform");
}

SmoothingPolicy parse_policy(const pt::ptree& s) {
  const std::string name = s.get<std::string>("policy", "wahba");
  const double alpha = to_double("alpha", s.get<std::string>("alpha", "1"));
  const double nu = to_double("nu", s.get<std::string>("nu", "0"));
  const double scale = to_double("scale_c", s.get<std::string>("scale_c", "1"));
  if (name == "truncation-fourier") return TruncationFourier{alpha, nu, scale};
  if (name == "truncation-wavelet") return TruncationWavelet{alpha, nu, scale};
  if (name == "wahba") {
    Wahba w;
    w.alpha = alpha;
    if (auto c = s.get_optional<std::string>("variance_c")) w.variance_c = to_double("variance_c", *c);
    if (auto l = s.get_optional<std::string>("level")) w.level = static_cast<int>(to_integer("level", *l));
    return w;
  }
  throw std::invalid_argument("config: policy must be wahba, truncation-fourier or truncation-wavelet");
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  const auto version = tree.get_optional<std::string>("schema_version");
  if (!version) throw std::invalid_argument("config: schema_version is required");
  if (to_integer("schema_version", *version) != 1)
    throw std::invalid_argument("config: unsupported schema_version " + *version + " (expected 1)");

  for (const auto& [key, value] : tree) {
    static const char* known[] = {"schema_version", "experiment", "dist", "alternative", "ahce", "kde", "gof", "gap"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw std::invalid_argument("config: unknown section or key '" + key + "'");
  }

  ExperimentSpec spec;
  const auto& ex = tree.get_child("experiment", pt::ptree{});
  check_keys(ex, "experiment", {"kind", "id", "seed", "replications", "eval_points", "n_grid", "estimators"});
  spec.kind = experiment_kind_from_string(ex.get<std::string>("kind", "rmse"));
  spec.id = ex.get<std::string>("id", to_string(spec.kind));
  spec.seed = static_cast<std::uint64_t>(to_integer("seed", ex.get<std::string>("seed", "0")));
  spec.replications = static_cast<int>(to_integer("replications", ex.get<std::string>("replications", "20")));
  spec.eval_points = static_cast<int>(to_integer("eval_points", ex.get<std::string>("eval_points", "1000")));
  for (const auto& v : split_list(ex.get<std::string>("n_grid", "")))
    spec.n_grid.push_back(static_cast<std::size_t>(to_integer("n_grid", v)));
  if (auto est = ex.get_optional<std::string>("estimators")) {
    spec.estimators.clear();
    for (const auto& v : split_list(*est)) spec.estimators.push_back(estimator_from_string(v));
  }

  if (auto d = tree.get_child_optional("dist")) spec.dist = parse_dist(*d, "dist");
  if (auto d = tree.get_child_optional("alternative")) spec.alternative = parse_dist(*d, "alternative");

  if (auto a = tree.get_child_optional("ahce")) {
    check_keys(*a, "ahce", {"basis", "policy", "alpha", "nu", "scale_c", "variance_c", "level"});
    spec.basis = basis_from_string(a->get<std::string>("basis", "fourier"));
    spec.policy = parse_policy(*a);
  }
  if (auto k = tree.get_child_optional("kde")) {
    check_keys(*k, "kde", {"scale", "rule"});
    const std::string scale = k->get<std::string>("scale", "auto");
    if (scale != "auto") spec.kde_scale = to_double("scale", scale);
    const std::string rule = k->get<std::string>("rule", "standard");
    if (rule == "standard") spec.kde_rule = KdeBandwidthRule::Standard;
    else if (rule == "literal") spec.kde_rule = KdeBandwidthRule::Literal;
    else throw std::invalid_argument("config: kde rule must be standard or literal");
  }
  if (auto g = tree.get_child_optional("gof")) {
    check_keys(*g, "gof", {"basis", "levels", "alpha", "significance", "bootstrap_reps", "flip_prob", "center_bootstrap",
                           "include_null_rate"});
    spec.gof.basis = basis_from_string(g->get<std::string>("basis", "haar"));
    for (const auto& v : split_list(g->get<std::string>("levels", ""))) spec.levels.push_back(static_cast<int>(to_integer("levels", v)));
    spec.gof.alpha = to_double("alpha", g->get<std::string>("alpha", "1"));
    spec.gof.significance = to_double("significance", g->get<std::string>("significance", "0.05"));
    spec.gof.bootstrap_reps = static_cast<int>(to_integer("bootstrap_reps", g->get<std::string>("bootstrap_reps", "1000")));
    spec.gof.flip_prob = to_double("flip_prob", g->get<std::string>("flip_prob", "0.5"));
    spec.gof.center_bootstrap = to_bool("center_bootstrap", g->get<std::string>("center_bootstrap", "false"));
    spec.include_null_rate = to_bool("include_null_rate", g->get<std::string>("include_null_rate", "false"));
  }
  if (auto g = tree.get_child_optional("gap")) {
    check_keys(*g, "gap", {"dim", "beta"});
    spec.gap_dim = static_cast<int>(to_integer("dim", g->get<std::string>("dim", "2")));
    spec.gap_beta = static_cast<int>(to_integer("beta", g->get<std::string>("beta", "1")));
  }
  validate(spec);
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) { return parse_experiment_spec(read_file(path)); }

// --- output ------------------------------------------------------------------------

std::string rows_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,estimator,n,level,metric,value,stderr\n";
  for (const auto& r : rows) {
    out += r.experiment + "," + r.estimator + "," + std::to_string(r.n) + "," + (r.level >= 0 ? std::to_string(r.level) : "") +
           "," + r.metric + "," + format_double(r.value) + "," + format_double(r.stderr_) + "\n";
  }
  return out;
}

std::string plot_series_csv(const std::vector<ResultRow>& rows) {
  std::string out = "series,x,y,stderr\n";
  for (const auto& r : rows) {
    if (r.n == 0) continue;  // summary rows (slopes) are not series points
    std::string series = r.estimator + ":" + r.metric;
    if (r.level >= 0) series += ":l=" + std::to_string(r.level);
    out += series + "," + std::to_string(r.n) + "," + format_double(r.value) + "," + format_double(r.stderr_) + "\n";
  }
  return out;
}

std::string summary_text(const ExperimentSpec& spec, const ExperimentResult& result) {
  std::ostringstream out;
  out << "experiment " << spec.id << " (" << to_string(spec.kind) << "), seed " << spec.seed << ", "
      << spec.replications << " replications\n";
  char buf[160];
  for (const auto& r : result.rows) {
    if (r.n == 0) continue;
    std::snprintf(buf, sizeof buf, "  %-8s n=%-6zu %s%-14s %.4g (se %.2g)\n", r.estimator.c_str(), r.n,
                  r.level >= 0 ? ("l=" + std::to_string(r.level) + " ").c_str() : "", r.metric.c_str(), r.value,
                  r.stderr_);
    out << buf;
  }
  if (result.fit) {
    std::snprintf(buf, sizeof buf, "  log-log slope %.4f, R^2 %.4f\n", result.fit->slope, result.fit->r_squared);
    out << buf;
  }
  return out.str();
}

NullDensity null_density_for(const SyntheticDist& null, BasisKind basis, int level) {
  if (std::holds_alternative<Uniform>(null)) return NullDensity::uniform(basis, dist_dim(null), level);
  std::vector<std::string> keys;
  if (const auto* pb = std::get_if<ProductBeta>(&null)) {
    for (std::size_t j = 0; j < pb->a.size(); ++j) keys.push_back(format_double(pb->a[j]) + "/" + format_double(pb->b[j]));
  } else {
    keys.assign(static_cast<std::size_t>(dist_dim(null)), "uniform");
  }
  return project_product(marginals(null), basis, level, 64, keys);
}

}  // namespace hxd
