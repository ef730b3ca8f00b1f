#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hxd/basis.hpp"
#include "hxd/spectral.hpp"

using namespace hxd;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// Haar from the textbook definition, independent of the library's dyadic
// arithmetic: psi = 1 on [0,1/2), -1 on [1/2,1), with x = 1 in the last cell.
double haar_ref(int k, int s, double x) {
  auto psi = [](double t) {
    if (t >= 0.0 && t < 0.5) return 1.0;
    if (t >= 0.5 && t < 1.0) return -1.0;
    return 0.0;
  };
  if (k == 0) return s == 0 ? 1.0 : (x == 1.0 ? -1.0 : psi(x));
  const double scale = std::pow(2.0, k);
  double t = scale * x - s;
  if (x == 1.0 && s == (1 << k) - 1) t = 1.0 - 1e-12;
  return std::pow(2.0, 0.5 * k) * psi(t);
}

struct Index1d {
  int k;
  int s;
};

std::vector<Index1d> haar_indices_1d(int level) {
  std::vector<Index1d> out{{0, 0}, {0, 1}};
  for (int k = 1; k <= level; ++k)
    for (int s = 0; s < (1 << k); ++s) out.push_back({k, s});
  return out;
}

}  // namespace

TEST(Fourier, Examples) {
  EXPECT_DOUBLE_EQ(eval_fourier(FrequencyIndex({0, 0}), std::vector<double>{0.3, 0.9}), 1.0);
  EXPECT_DOUBLE_EQ(eval_fourier(FrequencyIndex({1, 0}), std::vector<double>{0.0, 0.7}), kSqrt2);
  EXPECT_NEAR(fourier_1d(-1, 0.25), kSqrt2, 1e-15);
  EXPECT_NEAR(fourier_1d(2, 0.25), -kSqrt2, 1e-15);
}

TEST(Fourier, GramIsIdentity2d) {
  const QuadratureRule rule = composite_gauss_legendre(4, 16);  // 64 nodes
  std::vector<FrequencyIndex> idx;
  HyperbolicCross(2, 3).for_each([&](const MultiIndex&, const FrequencyIndex& s, std::size_t) { idx.push_back(s); });
  const std::size_t q = rule.nodes.size();
  std::vector<std::vector<double>> vals(idx.size(), std::vector<double>(q * q));
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t j = 0; j < q; ++j)
        vals[a][i * q + j] = fourier_1d(idx[a][0], rule.nodes[i]) * fourier_1d(idx[a][1], rule.nodes[j]);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a; b < idx.size(); ++b) {
      double g = 0.0;
      for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) g += rule.weights[i] * rule.weights[j] * vals[a][i * q + j] * vals[b][i * q + j];
      EXPECT_NEAR(g, a == b ? 1.0 : 0.0, 1e-10);
    }
}

TEST(Fourier, BoundedBySqrt2PowerD) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x{u(rng), u(rng), u(rng)};
    FrequencyIndex s({static_cast<int>(rng() % 17) - 8, static_cast<int>(rng() % 17) - 8, static_cast<int>(rng() % 17) - 8});
    EXPECT_LE(std::abs(eval_fourier(s, x)), std::pow(kSqrt2, 3) + 1e-12);
  }
}

TEST(Haar, Examples) {
  EXPECT_DOUBLE_EQ(eval_haar(MultiIndex({0, 0}), FrequencyIndex({0, 0}), std::vector<double>{0.8, 0.1}), 1.0);
  EXPECT_DOUBLE_EQ(haar_1d(1, 0, 0.1), kSqrt2);
  EXPECT_DOUBLE_EQ(haar_1d(1, 0, 0.3), -kSqrt2);
  EXPECT_DOUBLE_EQ(haar_1d(1, 1, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(haar_1d(0, 1, 1.0), -1.0);
}

TEST(Haar, RejectsBadTranslation) {
  EXPECT_THROW(haar_1d(2, 4, 0.5), std::out_of_range);
  EXPECT_THROW(haar_1d(0, 2, 0.5), std::out_of_range);
  EXPECT_THROW(eval_haar(MultiIndex({1, 1}), FrequencyIndex({0, 5}), std::vector<double>{0.9, 0.1}), std::out_of_range);
}

TEST(Haar, MatchesReferenceDefinition) {
  for (int k = 0; k <= 6; ++k) {
    const int count = k == 0 ? 2 : (1 << k);
    for (int s = 0; s < count; ++s)
      for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        EXPECT_DOUBLE_EQ(haar_1d(k, s, x), haar_ref(k, s, x)) << k << " " << s << " " << x;
      }
  }
}

TEST(Haar, ExactGramIsIdentity2d) {
  // Every function with |k| <= 3 is constant on cells of width 2^-4, so the
  // midpoint rule on that grid integrates products exactly (up to rounding of the sqrt(2) amplitudes).
  const int level = 3;
  const int cells = 1 << (level + 1);
  const auto idx = haar_indices_1d(level);
  std::vector<std::pair<Index1d, Index1d>> pairs;
  for (const auto& a : idx)
    for (const auto& b : idx)
      if (a.k + b.k <= level) pairs.push_back({a, b});
  std::vector<std::vector<double>> vals(pairs.size(), std::vector<double>(cells * cells));
  for (std::size_t p = 0; p < pairs.size(); ++p)
    for (int i = 0; i < cells; ++i)
      for (int j = 0; j < cells; ++j) {
        const std::vector<double> x{(i + 0.5) / cells, (j + 0.5) / cells};
        vals[p][i * cells + j] =
            eval_haar(MultiIndex({pairs[p].first.k, pairs[p].second.k}),
                      FrequencyIndex({pairs[p].first.s, pairs[p].second.s}), x);
      }
  const double w = 1.0 / (cells * cells);
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a; b < pairs.size(); ++b) {
      double g = 0.0;
      for (int c = 0; c < cells * cells; ++c) g += vals[a][c] * vals[b][c];
      EXPECT_NEAR(g * w, a == b ? 1.0 : 0.0, 1e-14);
    }
}

TEST(Haar, MomentConditionAndDisjointSupports) {
  const int cells = 1 << 8;
  for (const auto& [k, s] : haar_indices_1d(6)) {
    if (k == 0 && s == 0) continue;
    double m = 0.0;
    for (int i = 0; i < cells; ++i) m += haar_1d(k, s, (i + 0.5) / cells);
    EXPECT_NEAR(m, 0.0, 1e-12);
  }
  for (int k = 1; k <= 5; ++k)
    for (int i = 0; i < cells; ++i) {
      int nonzero = 0;
      for (int s = 0; s < (1 << k); ++s) nonzero += haar_1d(k, s, (i + 0.5) / cells) != 0.0;
      EXPECT_EQ(nonzero, 1);
    }
}

TEST(Basis1dValues, AgreesWithPointwiseEvaluation) {
  for (BasisKind kind : {BasisKind::Fourier, BasisKind::HaarWavelet})
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      const auto v = basis_values_1d(kind, 5, x);
      for (int k = 0; k <= 5; ++k) {
        std::vector<double> dense(block_size_1d(kind, k), 0.0);
        for (const auto& [p, val] : v.by_level[static_cast<std::size_t>(k)]) dense[p] = val;
        const auto ids = block_indices_1d(kind, k);
        for (std::size_t p = 0; p < ids.size(); ++p) EXPECT_DOUBLE_EQ(dense[p], basis_1d(kind, k, ids[p], x));
      }
    }
}

TEST(SupNorm, Values) {
  EXPECT_DOUBLE_EQ(basis_sup_norm(BasisKind::Fourier, MultiIndex({0, 2})), kSqrt2);
  EXPECT_DOUBLE_EQ(basis_sup_norm(BasisKind::HaarWavelet, MultiIndex({2, 1})), std::pow(2.0, 1.5));
}

TEST(BSpline, IndicatorAndHat) {
  EXPECT_DOUBLE_EQ(cardinal_bspline(0, 0.4), 1.0);
  EXPECT_DOUBLE_EQ(cardinal_bspline(0, 1.2), 0.0);
  EXPECT_DOUBLE_EQ(cardinal_bspline(1, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(cardinal_bspline(1, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(cardinal_bspline(1, 1.5), 0.5);
  EXPECT_DOUBLE_EQ(eval_bspline({1, 0, {0}}, std::vector<double>{1.0}), 1.0);
  EXPECT_DOUBLE_EQ(eval_bspline({0, 2, {1, 3}}, std::vector<double>{0.3, 0.8}), 1.0);
  EXPECT_DOUBLE_EQ(eval_bspline({0, 2, {1, 3}}, std::vector<double>{0.3, 0.6}), 0.0);
}

TEST(BSpline, MatchesClosedForms) {
  // quadratic: x^2/2, (-2x^2+6x-3)/2, (3-x)^2/2
  auto quad = [](double x) {
    if (x < 0 || x >= 3) return 0.0;
    if (x < 1) return x * x / 2;
    if (x < 2) return (-2 * x * x + 6 * x - 3) / 2;
    return (3 - x) * (3 - x) / 2;
  };
  // cubic via the convolution recursion written out as piecewise polynomials
  auto cubic = [](double x) {
    if (x < 0 || x >= 4) return 0.0;
    if (x < 1) return x * x * x / 6;
    if (x < 2) return (-3 * x * x * x + 12 * x * x - 12 * x + 4) / 6;
    if (x < 3) return (3 * x * x * x - 24 * x * x + 60 * x - 44) / 6;
    return (4 - x) * (4 - x) * (4 - x) / 6;
  };
  for (int i = -10; i <= 410; ++i) {
    const double x = i / 100.0;
    EXPECT_NEAR(cardinal_bspline(2, x), quad(x), 1e-14) << x;
    EXPECT_NEAR(cardinal_bspline(3, x), cubic(x), 1e-14) << x;
  }
}

TEST(BSpline, PartitionOfUnityAndNonNegative) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int a = 1; a <= 3; ++a)
    for (int t = 0; t < 100; ++t) {
      const double x = u(rng);
      double total = 0.0;
      for (int s = -10; s <= 10; ++s) {
        const double v = cardinal_bspline(a, x - s);
        EXPECT_GE(v, 0.0);
        total += v;
      }
      EXPECT_NEAR(total, 1.0, 1e-13);
    }
}
