#include "hxd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "hxd/io.hpp"
#include "hxd/rng.hpp"

namespace hxd {

namespace {

namespace bm = boost::math;

void check_beta(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || a.size() != b.size()) throw std::invalid_argument("Beta parameters: a and b need equal, non-zero length");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] > 0.0 && b[i] > 0.0)) throw std::invalid_argument("Beta parameters must be > 0");
}

// Integral of the Beta(a,b) cdf over [0, t].
double cdf_integral(double a, double b, double t) {
  if (t <= 0.0) return 0.0;
  t = std::min(t, 1.0);
  return t * bm::ibeta(a, b, t) - a / (a + b) * bm::ibeta(a + 1.0, b, t);
}

// Marginal of X0 + s U truncated to [0,1].
struct ShiftedBeta {
  double a, b, s, mass;

  ShiftedBeta(double a_, double b_, double s_) : a(a_), b(b_), s(s_) {
    mass = (cdf_integral(a, b, 1.0) - cdf_integral(a, b, 1.0 - s)) / s;
  }
  double pdf(double x) const {
    if (x < 0.0 || x > 1.0) return 0.0;
    const double hi = bm::ibeta(a, b, std::min(x, 1.0));
    const double lo = x - s > 0.0 ? bm::ibeta(a, b, x - s) : 0.0;
    return (hi - lo) / (s * mass);
  }
  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return (cdf_integral(a, b, x) - cdf_integral(a, b, x - s)) / (s * mass);
  }
};

double beta_pdf(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if ((x == 0.0 && a < 1.0) || (x == 1.0 && b < 1.0)) return std::numeric_limits<double>::infinity();
  return bm::pdf(bm::beta_distribution<double>(a, b), x);
}

}  // namespace

int dist_dim(const SyntheticDist& dist) {
  return std::visit(
      [](const auto& d) -> int {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ProductBeta> || std::is_same_v<T, BetaPlusUniform>) {
          return static_cast<int>(d.a.size());
        } else {
          return d.dim;
        }
      },
      dist);
}

std::string dist_name(const SyntheticDist& dist) {
  switch (dist.index()) {
    case 0: return "product-beta";
    case 1: return "t-mapped";
    case 2: return "beta-plus-uniform";
    default: return "uniform";
  }
}

void validate(const SyntheticDist& dist) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ProductBeta>) {
          check_beta(d.a, d.b);
        } else if constexpr (std::is_same_v<T, BetaPlusUniform>) {
          check_beta(d.a, d.b);
          if (!(d.shift > 0.0 && d.shift < 1.0)) throw std::invalid_argument("shift must lie in (0,1)");
        } else if constexpr (std::is_same_v<T, StudentTMapped>) {
          if (!(d.dof > 0.0)) throw std::invalid_argument("degrees of freedom must be > 0");
          if (d.dim < 1) throw std::invalid_argument("dimension must be >= 1");
        } else {
          if (d.dim < 1) throw std::invalid_argument("dimension must be >= 1");
        }
      },
      dist);
}

SampleMatrix draw(const SyntheticDist& dist, std::size_t n, std::uint64_t seed) {
  validate(dist);
  if (n < 1) throw std::invalid_argument("draw: n must be >= 1");
  const std::size_t dim = static_cast<std::size_t>(dist_dim(dist));
  SampleMatrix out(n, dim);
  Rng rng(seed);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ProductBeta>) {
          std::vector<bm::beta_distribution<double>> law;
          for (std::size_t j = 0; j < dim; ++j) law.emplace_back(d.a[j], d.b[j]);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) out(i, j) = bm::quantile(law[j], uniform01(rng));
        } else if constexpr (std::is_same_v<T, BetaPlusUniform>) {
          std::vector<bm::beta_distribution<double>> law;
          for (std::size_t j = 0; j < dim; ++j) law.emplace_back(d.a[j], d.b[j]);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
              double x = bm::quantile(law[j], uniform01(rng)) + d.shift * uniform01(rng);
              if (d.boundary == BetaPlusUniform::Boundary::Clamp) {
                x = std::min(x, 1.0);
              } else {
                while (x > 1.0) x = bm::quantile(law[j], uniform01(rng)) + d.shift * uniform01(rng);
              }
              out(i, j) = x;
            }
        } else if constexpr (std::is_same_v<T, StudentTMapped>) {
          const bm::students_t_distribution<double> law(d.dof);
          std::student_t_distribution<double> t(d.dof);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) out(i, j) = bm::cdf(law, t(rng));
        } else {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < dim; ++j) out(i, j) = uniform01(rng);
        }
      },
      dist);
  return out;
}

double density(const SyntheticDist& dist, Point x) {
  if (x.size() != static_cast<std::size_t>(dist_dim(dist))) throw std::invalid_argument("density: dimension mismatch");
  for (double v : x)
    if (v < 0.0 || v > 1.0) return 0.0;
  double p = 1.0;
  if (const auto* pb = std::get_if<ProductBeta>(&dist)) {
    for (std::size_t j = 0; j < x.size(); ++j) p *= beta_pdf(pb->a[j], pb->b[j], x[j]);
  } else if (const auto* bu = std::get_if<BetaPlusUniform>(&dist)) {
    for (std::size_t j = 0; j < x.size(); ++j) p *= ShiftedBeta(bu->a[j], bu->b[j], bu->shift).pdf(x[j]);
  }
  return p;
}

double boundary_mass(const BetaPlusUniform& dist, std::size_t j) {
  validate(dist);
  if (j >= dist.a.size()) throw std::out_of_range("boundary_mass: coordinate out of range");
  return 1.0 - ShiftedBeta(dist.a[j], dist.b[j], dist.shift).mass;
}

std::vector<Marginal1d> marginals(const SyntheticDist& dist) {
  validate(dist);
  const std::size_t dim = static_cast<std::size_t>(dist_dim(dist));
  std::vector<Marginal1d> out;
  for (std::size_t j = 0; j < dim; ++j) {
    if (const auto* pb = std::get_if<ProductBeta>(&dist)) {
      const double a = pb->a[j], b = pb->b[j];
      out.push_back({[a, b](double x) { return beta_pdf(a, b, x); },
                     [a, b](double x) { return bm::ibeta(a, b, std::clamp(x, 0.0, 1.0)); }});
    } else if (const auto* bu = std::get_if<BetaPlusUniform>(&dist)) {
      const ShiftedBeta m(bu->a[j], bu->b[j], bu->shift);
      out.push_back({[m](double x) { return m.pdf(x); }, [m](double x) { return m.cdf(x); }});
    } else {
      out.push_back({[](double x) { return x >= 0.0 && x <= 1.0 ? 1.0 : 0.0; },
                     [](double x) { return std::clamp(x, 0.0, 1.0); }});
    }
  }
  return out;
}

void write_samples_csv(std::ostream& out, const SampleMatrix& s) {
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.dim(); ++j) {
      if (j) out << ',';
      out << format_double(s(i, j));
    }
    out << '\n';
  }
}

SampleMatrix read_samples_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string tok;
    std::size_t cols = 0;
    while (std::getline(ss, tok, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw std::runtime_error("samples CSV line " + std::to_string(line_no) + ": not a number: '" + tok + "'");
      }
      if (tok.find_first_not_of(" \t", used) != std::string::npos)
        throw std::runtime_error("samples CSV line " + std::to_string(line_no) + ": not a number: '" + tok + "'");
      data.push_back(v);
      ++cols;
    }
    if (dim == 0) dim = cols;
    if (cols != dim || cols == 0)
      throw std::runtime_error("samples CSV line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                               " columns");
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("samples CSV: no observations");
  return SampleMatrix(rows, dim, std::move(data));
}

}  // namespace hxd
