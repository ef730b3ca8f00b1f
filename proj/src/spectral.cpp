#include "hxd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hxd/detail/cross_visit.hpp"

namespace hxd {

namespace {

bool key_less(const CoefficientEntry& a, const CoefficientEntry& b) {
  if (a.k != b.k) return a.k < b.k;
  return a.s < b.s;
}

}  // namespace

CoefficientTable::CoefficientTable(BasisKind basis, int dim, int level, std::vector<CoefficientEntry> entries)
    : basis_(basis), dim_(dim), level_(level), entries_(std::move(entries)) {
  if (dim < 1) throw std::invalid_argument("CoefficientTable: dimension must be >= 1");
  if (level < 0) throw std::invalid_argument("CoefficientTable: level must be >= 0");
  for (const auto& e : entries_) {
    if (e.k.dim() != static_cast<std::size_t>(dim) || e.s.dim() != static_cast<std::size_t>(dim))
      throw std::invalid_argument("CoefficientTable: entry dimension mismatch");
    if (e.k.order() > level) throw std::invalid_argument("CoefficientTable: entry outside the cross");
    for (std::size_t j = 0; j < e.k.dim(); ++j) {
      if (block_position_1d(basis, e.k[j], e.s[j]) < 0)
        throw std::invalid_argument("CoefficientTable: index not in its block");
    }
  }
  std::sort(entries_.begin(), entries_.end(), key_less);
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (!key_less(entries_[i - 1], entries_[i])) throw std::invalid_argument("CoefficientTable: duplicate index");
  }
}

CoefficientTable CoefficientTable::from_dense(const HyperbolicCross& cross, std::span<const double> values) {
  if (values.size() != cross.size()) throw std::invalid_argument("from_dense: size mismatch");
  std::vector<CoefficientEntry> entries;
  entries.reserve(values.size());
  cross.for_each([&](const MultiIndex& k, const FrequencyIndex& s, std::size_t flat) {
    entries.push_back({k, s, values[flat]});
  });
  return CoefficientTable(cross.kind(), cross.dim(), cross.level(), std::move(entries));
}

double CoefficientTable::value(const MultiIndex& k, const FrequencyIndex& s) const {
  const CoefficientEntry probe{k, s, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe, key_less);
  if (it == entries_.end() || it->k != k || it->s != s) return 0.0;
  return it->value;
}

std::vector<double> CoefficientTable::to_dense(const HyperbolicCross& cross) const {
  std::vector<double> out(cross.size(), 0.0);
  for (const auto& e : entries_) {
    const long i = cross.index_of(e.k, e.s);
    if (i >= 0) out[static_cast<std::size_t>(i)] = e.value;
  }
  return out;
}

CoefficientTable CoefficientTable::minus(const CoefficientTable& other) const {
  if (other.basis_ != basis_) throw std::invalid_argument("CoefficientTable::minus: basis mismatch");
  if (other.dim_ != dim_) throw std::invalid_argument("CoefficientTable::minus: dimension mismatch");
  std::vector<CoefficientEntry> out;
  out.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && key_less(*a, *b))) {
      out.push_back(*a++);
    } else if (a == entries_.end() || key_less(*b, *a)) {
      out.push_back({b->k, b->s, -b->value});
      ++b;
    } else {
      out.push_back({a->k, a->s, a->value - b->value});
      ++a;
      ++b;
    }
  }
  return CoefficientTable(basis_, dim_, std::max(level_, other.level_), std::move(out));
}

CoefficientTable CoefficientTable::scaled(double factor) const {
  auto out = entries_;
  for (auto& e : out) e.value *= factor;
  return CoefficientTable(basis_, dim_, level_, std::move(out));
}

CoefficientTable CoefficientTable::multiplied(
    const std::function<double(const MultiIndex&, const FrequencyIndex&)>& b) const {
  std::vector<CoefficientEntry> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) {
    const double m = b(e.k, e.s);
    if (m != 0.0) out.push_back({e.k, e.s, m * e.value});
  }
  return CoefficientTable(basis_, dim_, level_, std::move(out));
}

double weighted_block_norm(const CoefficientTable& t, double r) {
  double total = 0.0;
  for (const auto& e : t.entries()) total += std::exp2(2.0 * r * e.k.order()) * e.value * e.value;
  return std::sqrt(total);
}

double mixed_sobolev_norm(const CoefficientTable& t, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("mixed_sobolev_norm: requires r >= 0");
  return weighted_block_norm(t, r);
}

double ipm_sobolev_ball(const CoefficientTable& a, const CoefficientTable& b, double beta, double radius) {
  if (a.basis() != b.basis()) throw std::invalid_argument("ipm_sobolev_ball: basis mismatch");
  if (a.dim() != b.dim()) throw std::invalid_argument("ipm_sobolev_ball: dimension mismatch");
  if (!(beta >= 0.0)) throw std::invalid_argument("ipm_sobolev_ball: requires beta >= 0");
  if (!(radius > 0.0)) throw std::invalid_argument("ipm_sobolev_ball: requires L > 0");
  return radius * weighted_block_norm(a.minus(b), -beta);
}

double eval_table(const CoefficientTable& t, Point x) {
  if (x.size() != static_cast<std::size_t>(t.dim())) throw std::invalid_argument("eval_table: dimension mismatch");
  double total = 0.0;
  for (const auto& e : t.entries()) total += e.value * eval_basis(t.basis(), e.k, e.s, x);
  return total;
}

// --- quadrature --------------------------------------------------------------

QuadratureRule gauss_legendre(int points) {
  if (points < 1) throw std::invalid_argument("gauss_legendre: requires at least one point");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(points));
  rule.weights.resize(static_cast<std::size_t>(points));
  const int m = (points + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= points; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = points * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 1; j <= points; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = points * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(points - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(points - 1 - i)] = w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int panels, int per_panel) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: requires panels >= 1");
  const QuadratureRule base = gauss_legendre(per_panel);
  QuadratureRule rule;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      rule.nodes.push_back(a + 0.5 * h * (base.nodes[i] + 1.0));
      rule.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return rule;
}

int default_quad_nodes(int level) { return std::max(64, 4 * (1 << level)); }

namespace {

constexpr int kPanelPoints = 16;

QuadratureRule rule_for(BasisKind basis, int level, int quad_nodes) {
  if (quad_nodes < 2) throw std::invalid_argument("projection: quad_nodes must be >= 2");
  if (level < 0) throw std::invalid_argument("projection: level must be >= 0");
  if (quad_nodes < (1 << level))
    throw std::invalid_argument("projection: quad_nodes below the 2^l resolution of the cross");
  if (basis == BasisKind::Fourier) {
    const int per = std::min(kPanelPoints, quad_nodes);
    // at least one panel per period of the highest retained frequency
    const int panels = std::max((quad_nodes + per - 1) / per, 1 << level);
    return composite_gauss_legendre(panels, per);
  }
  const int panels = 1 << (level + 1);
  const int per = std::max(2, (quad_nodes + panels - 1) / panels);
  return composite_gauss_legendre(panels, std::min(per, kPanelPoints));
}

}  // namespace

CoefficientTable project(const Function& f, int dim, BasisKind basis, int level, int quad_nodes) {
  const QuadratureRule rule = rule_for(basis, level, quad_nodes);
  const HyperbolicCross cross(dim, level, basis);
  const std::size_t q = rule.nodes.size();
  const double points = std::pow(static_cast<double>(q), dim);
  if (points * static_cast<double>(cross.size()) > 4e10)
    throw std::invalid_argument("project: tensor quadrature too large; use project_product");

  std::vector<Basis1dValues> node_values(q);
  for (std::size_t i = 0; i < q; ++i) node_values[i] = basis_values_1d(basis, level, rule.nodes[i]);

  std::vector<double> coeffs(cross.size(), 0.0);
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  std::vector<Basis1dValues> vals(static_cast<std::size_t>(dim));
  const std::size_t total = static_cast<std::size_t>(points);
  for (std::size_t t = 0; t < total; ++t) {
    double w = 1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      x[j] = rule.nodes[idx[j]];
      w *= rule.weights[idx[j]];
      vals[j] = node_values[idx[j]];
    }
    const double fw = f(x) * w;
    if (fw != 0.0) detail::visit_cross(cross, vals, [&](std::size_t flat, double v) { coeffs[flat] += fw * v; });
    for (std::size_t j = idx.size(); j-- > 0;) {
      if (++idx[j] < q) break;
      idx[j] = 0;
    }
  }
  return CoefficientTable::from_dense(cross, coeffs);
}

Coefficients1d project_1d(const Marginal1d& m, BasisKind basis, int level, int quad_nodes) {
  Coefficients1d out;
  out.basis = basis;
  out.level = level;
  out.by_level.resize(static_cast<std::size_t>(level) + 1);

  if (basis == BasisKind::Fourier) {
    const QuadratureRule rule = rule_for(basis, level, quad_nodes);
    for (int k = 0; k <= level; ++k) out.by_level[static_cast<std::size_t>(k)].assign(block_size_1d(basis, k), 0.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double fw = m.pdf(rule.nodes[i]) * rule.weights[i];
      const auto vals = basis_values_1d(basis, level, rule.nodes[i]);
      for (int k = 0; k <= level; ++k) {
        auto& lv = out.by_level[static_cast<std::size_t>(k)];
        for (const auto& [p, v] : vals.by_level[static_cast<std::size_t>(k)]) lv[p] += fw * v;
      }
    }
    return out;
  }

  // Haar: masses of the finest half-cells, then differences of dyadic sums.
  const std::size_t cells = std::size_t{1} << (level + 1);
  std::vector<double> prefix(cells + 1, 0.0);
  if (m.cdf) {
    const double f0 = m.cdf(0.0);
    for (std::size_t c = 1; c <= cells; ++c) prefix[c] = m.cdf(static_cast<double>(c) / cells) - f0;
  } else {
    const QuadratureRule rule = rule_for(basis, level, std::max(quad_nodes, 1 << level));
    const std::size_t per = rule.nodes.size() / cells;
    for (std::size_t c = 0; c < cells; ++c) {
      double mass = 0.0;
      for (std::size_t i = c * per; i < (c + 1) * per; ++i) mass += m.pdf(rule.nodes[i]) * rule.weights[i];
      prefix[c + 1] = prefix[c] + mass;
    }
  }
  auto mass = [&](std::size_t lo, std::size_t hi) { return prefix[hi] - prefix[lo]; };
  out.by_level[0] = {mass(0, cells), mass(0, cells / 2) - mass(cells / 2, cells)};
  for (int k = 1; k <= level; ++k) {
    const std::size_t count = std::size_t{1} << k;
    const std::size_t width = cells / count;  // finest cells per translation
    const double amp = std::pow(2.0, 0.5 * k);
    auto& lv = out.by_level[static_cast<std::size_t>(k)];
    lv.resize(count);
    for (std::size_t s = 0; s < count; ++s) {
      const std::size_t lo = s * width;
      lv[s] = amp * (mass(lo, lo + width / 2) - mass(lo + width / 2, lo + width));
    }
  }
  return out;
}

ProductCoefficients::ProductCoefficients(BasisKind basis, int level,
                                         std::vector<std::shared_ptr<const Coefficients1d>> factors)
    : basis_(basis), level_(level), factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("ProductCoefficients: no factors");
  for (const auto& f : factors_) {
    if (!f || f->basis != basis || f->level < level)
      throw std::invalid_argument("ProductCoefficients: factor basis/level mismatch");
    std::vector<double> e(static_cast<std::size_t>(level) + 1, 0.0);
    for (int k = 0; k <= level; ++k)
      for (double c : f->by_level[static_cast<std::size_t>(k)]) e[static_cast<std::size_t>(k)] += c * c;
    energy_.push_back(std::move(e));
  }
}

double ProductCoefficients::level_mean(int j, int k, double x) const {
  const auto& lv = factors_[static_cast<std::size_t>(j)]->by_level[static_cast<std::size_t>(k)];
  if (basis_ == BasisKind::HaarWavelet) {
    if (k == 0) return lv[0] + haar_1d(0, 1, x) * lv[1];
    const long half = dyadic_cell(x, k + 1);
    const double amp = std::pow(2.0, 0.5 * k);
    const double v = (half & 1) ? -amp : amp;
    return v * lv[static_cast<std::size_t>(half >> 1)];
  }
  if (k == 0) return lv[0];
  const int lo = 1 << (k - 1);
  const int hi = 1 << k;
  double total = 0.0;
  for (int s = lo; s < hi; ++s) {
    const double th = 2.0 * std::numbers::pi * s * x;
    total += std::numbers::sqrt2 * (std::cos(th) * lv[static_cast<std::size_t>(s)] +
                                    std::sin(th) * lv[static_cast<std::size_t>(hi - 1 - s)]);
  }
  return total;
}

CoefficientTable ProductCoefficients::to_table() const {
  const HyperbolicCross cross(dim(), level_, basis_);
  std::vector<double> values(cross.size());
  cross.for_each([&](const MultiIndex& k, const FrequencyIndex& s, std::size_t flat) {
    double v = 1.0;
    for (std::size_t j = 0; j < k.dim(); ++j) {
      const long p = block_position_1d(basis_, k[j], s[j]);
      v *= factors_[j]->by_level[static_cast<std::size_t>(k[j])][static_cast<std::size_t>(p)];
    }
    values[flat] = v;
  });
  return CoefficientTable::from_dense(cross, values);
}

ProductCoefficients project_product(const std::vector<Marginal1d>& marginals, BasisKind basis, int level,
                                    int quad_nodes, const std::vector<std::string>& share_keys) {
  if (!share_keys.empty() && share_keys.size() != marginals.size())
    throw std::invalid_argument("project_product: one share key per marginal");
  std::vector<std::shared_ptr<const Coefficients1d>> factors;
  std::map<std::string, std::shared_ptr<const Coefficients1d>> cache;
  for (std::size_t j = 0; j < marginals.size(); ++j) {
    if (!share_keys.empty()) {
      if (auto it = cache.find(share_keys[j]); it != cache.end()) {
        factors.push_back(it->second);
        continue;
      }
    }
    auto c = std::make_shared<const Coefficients1d>(project_1d(marginals[j], basis, level, quad_nodes));
    if (!share_keys.empty()) cache[share_keys[j]] = c;
    factors.push_back(std::move(c));
  }
  return ProductCoefficients(basis, level, std::move(factors));
}

CoefficientTable smooth_function(const CoefficientTable& f, const SmoothingPolicy& policy, std::size_t n) {
  if (needs_sample_variance(policy))
    throw std::invalid_argument("smooth_function: per-index Wahba constants need a fitted model");
  check_policy_basis(policy, f.basis());
  const int level = select_level(policy, n, f.dim());
  std::vector<CoefficientEntry> out;
  for (const auto& e : f.entries()) {
    if (e.k.order() > level) continue;
    const double b = policy_multiplier(policy, e.k.order(), n, 0.0);
    if (b != 0.0) out.push_back({e.k, e.s, b * e.value});
  }
  return CoefficientTable(f.basis(), f.dim(), std::min(level, f.level()), std::move(out));
}

// --- CSV -----------------------------------------------------------------------

void write_table_csv(std::ostream& out, const CoefficientTable& t) {
  out << "dim,level,basis\n" << t.dim() << ',' << t.level() << ',' << to_string(t.basis()) << '\n';
  out << std::setprecision(17);
  for (const auto& e : t.entries()) {
    for (int v : e.k.levels) out << v << ',';
    for (int v : e.s.entries) out << v << ',';
    out << e.value << '\n';
  }
}

CoefficientTable read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("dim,level,basis", 0) != 0)
    throw std::runtime_error("coefficient CSV: missing 'dim,level,basis' header");
  if (!std::getline(in, line)) throw std::runtime_error("coefficient CSV: missing metadata row");
  int dim = 0;
  int level = 0;
  std::string basis;
  {
    std::stringstream ss(line);
    std::string tok;
    if (!std::getline(ss, tok, ',')) throw std::runtime_error("coefficient CSV: bad metadata");
    dim = std::stoi(tok);
    if (!std::getline(ss, tok, ',')) throw std::runtime_error("coefficient CSV: bad metadata");
    level = std::stoi(tok);
    if (!std::getline(ss, basis, ',')) throw std::runtime_error("coefficient CSV: bad metadata");
    while (!basis.empty() && (basis.back() == '\r' || basis.back() == ' ')) basis.pop_back();
  }
  if (dim < 1) throw std::runtime_error("coefficient CSV: bad dimension");
  std::vector<CoefficientEntry> entries;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> toks;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    if (toks.size() != static_cast<std::size_t>(2 * dim + 1))
      throw std::runtime_error("coefficient CSV: row has wrong column count");
    std::vector<int> k(static_cast<std::size_t>(dim));
    std::vector<int> s(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      k[static_cast<std::size_t>(j)] = std::stoi(toks[static_cast<std::size_t>(j)]);
      s[static_cast<std::size_t>(j)] = std::stoi(toks[static_cast<std::size_t>(dim + j)]);
    }
    entries.push_back({MultiIndex(std::move(k)), FrequencyIndex(std::move(s)), std::stod(toks.back())});
  }
  return CoefficientTable(basis_from_string(basis), dim, level, std::move(entries));
}

}  // namespace hxd
