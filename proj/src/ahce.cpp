#include "hxd/ahce.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hxd/detail/cross_visit.hpp"
#include "hxd/io.hpp"
#include "hxd/parallel.hpp"
#include "hxd/rng.hpp"

namespace hxd {

namespace {

std::vector<Basis1dValues> point_values(BasisKind kind, int level, Point x) {
  std::vector<Basis1dValues> vals(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) vals[j] = basis_values_1d(kind, level, x[j]);
  return vals;
}

constexpr std::size_t kFitChunks = 8;

}  // namespace

AhceModel::AhceModel(std::shared_ptr<const HyperbolicCross> cross, SmoothingPolicy policy, std::size_t n,
                     std::vector<double> raw, std::vector<double> multipliers)
    : cross_(std::move(cross)),
      policy_(std::move(policy)),
      n_(n),
      raw_(std::move(raw)),
      multipliers_(std::move(multipliers)) {
  if (!cross_) throw std::invalid_argument("AhceModel: missing cross");
  if (raw_.size() != cross_->size() || multipliers_.size() != cross_->size())
    throw std::invalid_argument("AhceModel: coefficient count does not match the cross");
  coeffs_.resize(raw_.size());
  for (std::size_t i = 0; i < raw_.size(); ++i) coeffs_[i] = multipliers_[i] * raw_[i];
}

CoefficientTable AhceModel::table() const { return CoefficientTable::from_dense(*cross_, coeffs_); }

void check_samples(const SampleMatrix& samples) {
  if (samples.rows() < 2) throw std::invalid_argument("at least two observations are required");
  if (samples.dim() < 1) throw std::invalid_argument("observations need at least one coordinate");
  if (!samples.in_unit_cube()) throw OutOfCubeError("observations must lie in [0,1]^D");
}

AhceModel fit(const SampleMatrix& samples, BasisKind basis, const SmoothingPolicy& policy) {
  check_samples(samples);
  check_policy_basis(policy, basis);
  const std::size_t n = samples.rows();
  const int dim = static_cast<int>(samples.dim());
  const int level = select_level(policy, n, dim);
  auto cross = std::make_shared<const HyperbolicCross>(dim, level, basis);
  const std::size_t size = cross->size();
  const bool want_sq = needs_sample_variance(policy);

  // Fixed chunking keeps the summation order independent of the thread count.
  const std::size_t chunks = std::min(kFitChunks, n);
  std::vector<std::vector<double>> sums(chunks), squares(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    auto& sum = sums[c];
    auto& sq = squares[c];
    sum.assign(size, 0.0);
    if (want_sq) sq.assign(size, 0.0);
    for (std::size_t i = n * c / chunks; i < n * (c + 1) / chunks; ++i) {
      const auto vals = point_values(basis, level, samples.row(i));
      if (want_sq) {
        detail::visit_cross(*cross, vals, [&](std::size_t f, double v) {
          sum[f] += v;
          sq[f] += v * v;
        });
      } else {
        detail::visit_cross(*cross, vals, [&](std::size_t f, double v) { sum[f] += v; });
      }
    }
  });

  const double nn = static_cast<double>(n);
  std::vector<double> raw(size, 0.0), b(size, 1.0);
  for (std::size_t c = 0; c < chunks; ++c)
    for (std::size_t f = 0; f < size; ++f) raw[f] += sums[c][f];
  for (auto& v : raw) v /= nn;

  std::vector<double> second;
  if (want_sq) {
    second.assign(size, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
      for (std::size_t f = 0; f < size; ++f) second[f] += squares[c][f];
    for (auto& v : second) v /= nn;
  }
  for (const auto& blk : cross->blocks()) {
    const int order = blk.k.order();
    for (std::size_t f = blk.offset; f < blk.offset + blk.size; ++f) {
      const double var = want_sq ? std::max(0.0, second[f] - raw[f] * raw[f]) : 0.0;
      b[f] = policy_multiplier(policy, order, n, var);
    }
  }
  return AhceModel(std::move(cross), policy, n, std::move(raw), std::move(b));
}

double evaluate(const AhceModel& model, Point x) {
  if (x.size() != static_cast<std::size_t>(model.dim())) throw std::invalid_argument("evaluate: dimension mismatch");
  const auto vals = point_values(model.basis(), model.level(), x);
  const auto& c = model.coefficients();
  double total = 0.0;
  detail::visit_cross(model.cross(), vals, [&](std::size_t f, double v) { total += c[f] * v; });
  return total;
}

std::vector<double> evaluate_many(const AhceModel& model, const SampleMatrix& points) {
  std::vector<double> out(points.rows());
  parallel_for(points.rows(), [&](std::size_t i) { out[i] = evaluate(model, points.row(i)); });
  return out;
}

double kernel_form(const AhceModel& model, Point x, Point y) {
  if (x.size() != static_cast<std::size_t>(model.dim()) || y.size() != x.size())
    throw std::invalid_argument("kernel_form: dimension mismatch");
  std::vector<double> phix(model.cross().size(), 0.0);
  detail::visit_cross(model.cross(), point_values(model.basis(), model.level(), x),
                      [&](std::size_t f, double v) { phix[f] = v; });
  const auto& b = model.multipliers();
  double total = 0.0;
  detail::visit_cross(model.cross(), point_values(model.basis(), model.level(), y),
                      [&](std::size_t f, double v) { total += b[f] * phix[f] * v; });
  return total;
}

CoefficientTable smooth_function(const AhceModel& model, const CoefficientTable& f) {
  if (f.basis() != model.basis()) throw std::invalid_argument("smooth_function: basis mismatch");
  if (f.dim() != model.dim()) throw std::invalid_argument("smooth_function: dimension mismatch");
  std::vector<CoefficientEntry> out;
  out.reserve(f.size());
  const auto& b = model.multipliers();
  for (const auto& e : f.entries()) {
    const long i = model.cross().index_of(e.k, e.s);
    if (i < 0) continue;
    out.push_back({e.k, e.s, b[static_cast<std::size_t>(i)] * e.value});
  }
  return CoefficientTable(f.basis(), f.dim(), model.level(), std::move(out));
}

std::pair<double, double> smoothing_identity_check(const AhceModel& model, const CoefficientTable& f,
                                                   const SampleMatrix& samples) {
  check_samples(samples);
  const CoefficientTable smoothed = smooth_function(model, f);
  double spectral = 0.0;
  for (const auto& e : smoothed.entries()) {
    const long i = model.cross().index_of(e.k, e.s);
    spectral += e.value * model.raw()[static_cast<std::size_t>(i)];
  }
  double empirical = 0.0;
  for (std::size_t i = 0; i < samples.rows(); ++i) empirical += eval_table(smoothed, samples.row(i));
  return {spectral, empirical / static_cast<double>(samples.rows())};
}

double sampling_envelope(const AhceModel& model) {
  double m = 1.0;
  const auto& c = model.coefficients();
  for (const auto& blk : model.cross().blocks()) {
    const double sup = basis_sup_norm(model.basis(), blk.k);
    for (std::size_t f = blk.offset; f < blk.offset + blk.size; ++f) m += std::abs(c[f]) * sup;
  }
  return m;
}

namespace {

SampleMatrix sample_grid(const AhceModel& model, std::size_t m, Rng& rng) {
  const int dim = model.dim();
  const int bits = 10;
  const std::size_t side = std::size_t{1} << bits;
  const std::size_t cells = dim == 1 ? side : side * side;
  std::vector<double> cdf(cells + 1, 0.0);
  std::vector<double> centre(static_cast<std::size_t>(dim));
  for (std::size_t c = 0; c < cells; ++c) {
    if (dim == 1) {
      centre[0] = (static_cast<double>(c) + 0.5) / side;
    } else {
      centre[0] = (static_cast<double>(c / side) + 0.5) / side;
      centre[1] = (static_cast<double>(c % side) + 0.5) / side;
    }
    cdf[c + 1] = cdf[c] + std::max(0.0, evaluate(model, centre));
  }
  const double total = cdf.back();
  if (!(total > 0.0)) throw std::domain_error("sample: positive part of the estimate has zero mass");
  SampleMatrix out(m, static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < m; ++i) {
    const double u = uniform01(rng) * total;
    auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), u);
    std::size_t c = static_cast<std::size_t>(it - cdf.begin()) - 1;
    c = std::min(c, cells - 1);
    if (dim == 1) {
      out(i, 0) = (static_cast<double>(c) + uniform01(rng)) / side;
    } else {
      out(i, 0) = (static_cast<double>(c / side) + uniform01(rng)) / side;
      out(i, 1) = (static_cast<double>(c % side) + uniform01(rng)) / side;
    }
  }
  return out;
}

}  // namespace

SampleMatrix sample(const AhceModel& model, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample: m must be >= 1");
  Rng rng(seed);
  const double envelope = sampling_envelope(model);
  const std::size_t dim = static_cast<std::size_t>(model.dim());
  if (1.0 / envelope < 1e-3) {
    if (dim > 2) throw std::domain_error("sample: rejection envelope too loose for D > 2");
    return sample_grid(model, m, rng);
  }
  SampleMatrix out(m, dim);
  std::vector<double> x(dim);
  const std::size_t budget = std::max<std::size_t>(1000000, static_cast<std::size_t>(1e4 * envelope) * m);
  std::size_t tries = 0;
  for (std::size_t i = 0; i < m;) {
    if (++tries > budget) throw std::domain_error("sample: positive part of the estimate has zero mass");
    for (auto& v : x) v = uniform01(rng);
    const double p = evaluate(model, x);
    if (uniform01(rng) * envelope < p) {
      std::copy(x.begin(), x.end(), out.row(i).begin());
      ++i;
    }
  }
  return out;
}

// --- persistence -------------------------------------------------------------

namespace {

nlohmann::json policy_json(const SmoothingPolicy& policy) {
  nlohmann::json j;
  j["name"] = policy_name(policy);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        j["alpha"] = p.alpha;
        if constexpr (std::is_same_v<T, Wahba>) {
          j["variance_c"] = p.variance_c ? nlohmann::json(*p.variance_c) : nlohmann::json(nullptr);
          j["level"] = p.level ? nlohmann::json(*p.level) : nlohmann::json(nullptr);
        } else {
          j["nu"] = p.nu;
          j["scale_c"] = p.scale_c;
        }
      },
      policy);
  return j;
}

SmoothingPolicy policy_from_json(const nlohmann::json& j) {
  const std::string name = j.at("name").get<std::string>();
  if (name == "wahba") {
    Wahba w;
    w.alpha = j.at("alpha").get<double>();
    if (j.contains("variance_c") && !j["variance_c"].is_null()) w.variance_c = j["variance_c"].get<double>();
    if (j.contains("level") && !j["level"].is_null()) w.level = j["level"].get<int>();
    return w;
  }
  auto fill = [&](auto p) {
    p.alpha = j.at("alpha").get<double>();
    p.nu = j.at("nu").get<double>();
    p.scale_c = j.at("scale_c").get<double>();
    return SmoothingPolicy(p);
  };
  if (name == "truncation-fourier") return fill(TruncationFourier{});
  if (name == "truncation-wavelet") return fill(TruncationWavelet{});
  throw std::invalid_argument("unknown policy '" + name + "'");
}

}  // namespace

std::string model_metadata_json(const AhceModel& model) {
  nlohmann::json j;
  j["basis"] = to_string(model.basis());
  j["dim"] = model.dim();
  j["level"] = model.level();
  j["n"] = model.n();
  j["policy"] = policy_json(model.policy());
  j["seed"] = model.seed ? nlohmann::json(*model.seed) : nlohmann::json(nullptr);
  j["multipliers"] = model.multipliers();
  return j.dump(2) + "\n";
}

AhceModel model_from_parts(const CoefficientTable& table, const std::string& metadata_json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(metadata_json);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model metadata: ") + e.what());
  }
  try {
    const BasisKind basis = basis_from_string(j.at("basis").get<std::string>());
    const int level = j.at("level").get<int>();
    const int dim = j.at("dim").get<int>();
    if (basis != table.basis() || dim != table.dim())
      throw std::runtime_error("model metadata does not match the coefficient table");
    auto cross = std::make_shared<const HyperbolicCross>(dim, level, basis);
    auto b = j.at("multipliers").get<std::vector<double>>();
    if (b.size() != cross->size()) throw std::runtime_error("model metadata: multiplier count mismatch");
    const auto coeffs = table.to_dense(*cross);
    std::vector<double> raw(coeffs.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = b[i] != 0.0 ? coeffs[i] / b[i] : 0.0;
    AhceModel model(std::move(cross), policy_from_json(j.at("policy")), j.at("n").get<std::size_t>(), std::move(raw),
                    std::move(b));
    if (j.contains("seed") && !j["seed"].is_null()) model.seed = j["seed"].get<std::uint64_t>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("model metadata: ") + e.what());
  }
}

void save_model(const AhceModel& model, const std::string& path) {
  std::ostringstream table;
  write_table_csv(table, model.table());
  write_file_atomic(path, table.str());
  write_file_atomic(path + ".json", model_metadata_json(model));
}

AhceModel load_model(const std::string& path) {
  std::istringstream table(read_file(path));
  return model_from_parts(read_table_csv(table), read_file(path + ".json"));
}

}  // namespace hxd
