#include "hxd/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hxd {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double fourier_1d(int s, double x) {
  if (s == 0) return 1.0;
  if (s > 0) return kSqrt2 * std::cos(kTwoPi * s * x);
  return kSqrt2 * std::sin(kTwoPi * (-s) * x);
}

double eval_fourier(const FrequencyIndex& s, Point x) {
  if (s.dim() != x.size()) throw std::invalid_argument("eval_fourier: dimension mismatch");
  double v = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) v *= fourier_1d(s[j], x[j]);
  return v;
}

long dyadic_cell(double x, int m) {
  const long cells = 1L << m;
  long c = static_cast<long>(std::floor(std::ldexp(x, m)));
  if (c >= cells) c = cells - 1;
  if (c < 0) c = 0;
  return c;
}

double haar_1d(int k, int s, double x) {
  if (k < 0) throw std::invalid_argument("haar_1d: negative level");
  if (k == 0) {
    if (s == 0) return 1.0;
    if (s != 1) throw std::out_of_range("haar_1d: translation out of range at level 0");
    return dyadic_cell(x, 1) == 0 ? 1.0 : -1.0;
  }
  if (s < 0 || s >= (1 << k)) {
    throw std::out_of_range("haar_1d: translation " + std::to_string(s) + " out of range at level " +
                            std::to_string(k));
  }
  const long half = dyadic_cell(x, k + 1);
  if ((half >> 1) != s) return 0.0;
  const double amp = std::ldexp(1.0, k / 2) * ((k % 2) ? kSqrt2 : 1.0);
  return (half & 1) ? -amp : amp;
}

double eval_haar(const MultiIndex& k, const FrequencyIndex& s, Point x) {
  if (s.dim() != x.size() || k.dim() != x.size())
    throw std::invalid_argument("eval_haar: dimension mismatch");
  double v = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    v *= haar_1d(k[j], s[j], x[j]);
    if (v == 0.0) {
      // still validate the remaining translations
      for (std::size_t t = j + 1; t < x.size(); ++t) haar_1d(k[t], s[t], 0.0);
      return 0.0;
    }
  }
  return v;
}

double basis_1d(BasisKind kind, int k, int s, double x) {
  return kind == BasisKind::Fourier ? fourier_1d(s, x) : haar_1d(k, s, x);
}

double eval_basis(BasisKind kind, const MultiIndex& k, const FrequencyIndex& s, Point x) {
  return kind == BasisKind::Fourier ? eval_fourier(s, x) : eval_haar(k, s, x);
}

double basis_sup_norm(BasisKind kind, const MultiIndex& k) {
  double v = 1.0;
  for (int kj : k.levels) {
    if (kind == BasisKind::Fourier) {
      if (kj > 0) v *= kSqrt2;
    } else {
      v *= std::pow(2.0, 0.5 * kj);
    }
  }
  return v;
}

Basis1dValues basis_values_1d(BasisKind kind, int max_level, double x) {
  Basis1dValues out;
  out.by_level.resize(static_cast<std::size_t>(max_level) + 1);
  if (kind == BasisKind::Fourier) {
    out.by_level[0] = {{0, 1.0}};
    for (int k = 1; k <= max_level; ++k) {
      const int lo = 1 << (k - 1);
      const int hi = 1 << k;
      auto& lv = out.by_level[static_cast<std::size_t>(k)];
      lv.reserve(static_cast<std::size_t>(hi));
      for (int s = -(hi - 1); s <= -lo; ++s)
        lv.emplace_back(static_cast<std::size_t>(s + hi - 1), fourier_1d(s, x));
      for (int s = lo; s < hi; ++s) lv.emplace_back(static_cast<std::size_t>(s), fourier_1d(s, x));
    }
    return out;
  }
  out.by_level[0] = {{0, 1.0}, {1, dyadic_cell(x, 1) == 0 ? 1.0 : -1.0}};
  for (int k = 1; k <= max_level; ++k) {
    const long half = dyadic_cell(x, k + 1);
    const double amp = std::ldexp(1.0, k / 2) * ((k % 2) ? kSqrt2 : 1.0);
    out.by_level[static_cast<std::size_t>(k)] = {
        {static_cast<std::size_t>(half >> 1), (half & 1) ? -amp : amp}};
  }
  return out;
}

double cardinal_bspline(int alpha, double x) {
  if (alpha < 0) throw std::invalid_argument("cardinal_bspline: negative order");
  if (x < 0.0 || x >= alpha + 1.0) {
    // closed at the right end only for alpha >= 1, where the value is 0 anyway
    return 0.0;
  }
  if (alpha == 0) return 1.0;
  // Cox-de Boor style recursion on the integer knots
  // N_a(x) = (x N_{a-1}(x) + (a+1-x) N_{a-1}(x-1)) / a
  // evaluated bottom-up on the unit cells that touch x.
  const int cell = static_cast<int>(std::floor(x));
  std::vector<double> n(static_cast<std::size_t>(alpha) + 1, 0.0);
  // n[i] holds N_d(x - (cell - i)) for the current degree d, i = 0..d
  n[0] = 1.0;
  for (int d = 1; d <= alpha; ++d) {
    std::vector<double> next(static_cast<std::size_t>(alpha) + 1, 0.0);
    for (int i = 0; i <= d; ++i) {
      const double t = x - (cell - i);  // argument of N_d
      const double left = (i <= d - 1) ? n[static_cast<std::size_t>(i)] : 0.0;        // N_{d-1}(t)
      const double right = (i >= 1) ? n[static_cast<std::size_t>(i - 1)] : 0.0;       // N_{d-1}(t-1)
      const double a = (t >= 0.0 && t < d) ? left : 0.0;
      const double b = (t - 1.0 >= 0.0 && t - 1.0 < d) ? right : 0.0;
      next[static_cast<std::size_t>(i)] = (t * a + (d + 1 - t) * b) / d;
    }
    n = std::move(next);
  }
  // N_alpha(x) corresponds to shift cell - i = 0, i.e. i = cell
  if (cell < 0 || cell > alpha) return 0.0;
  return n[static_cast<std::size_t>(cell)];
}

double eval_bspline(const BSplineSpec& spec, Point x) {
  if (spec.shift.size() != x.size()) throw std::invalid_argument("eval_bspline: dimension mismatch");
  double v = 1.0;
  const double scale = std::ldexp(1.0, spec.level);
  for (std::size_t j = 0; j < x.size() && v != 0.0; ++j)
    v *= cardinal_bspline(spec.order, scale * x[j] - spec.shift[j]);
  return v;
}

}  // namespace hxd
