#include "hxd/checks.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "hxd/ahce.hpp"
#include "hxd/basis.hpp"
#include "hxd/datagen.hpp"
#include "hxd/gof.hpp"
#include "hxd/hypercross.hpp"
#include "hxd/rng.hpp"
#include "hxd/spectral.hpp"

namespace hxd {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

CoefficientTable random_table(Rng& rng, int dim, int level, BasisKind basis) {
  const HyperbolicCross cross(dim, level, basis);
  std::vector<double> v(cross.size());
  for (double& x : v) x = 2.0 * uniform01(rng) - 1.0;
  return CoefficientTable::from_dense(cross, v);
}

}  // namespace

CheckResult check_combinatorics() {
  double worst = 0.0;
  for (double x : {0.25, 0.5, 2.0, 4.0})
    for (int l = 2; l <= 10; ++l)
      for (int d = 1; d <= 4; ++d)
        worst = std::max(worst, std::abs(geometric_binomial_sum(x, l, d) / geometric_binomial_sum_literal(x, l, d) - 1.0));
  bool cardinality = true;
  for (int d = 1; d <= 4 && cardinality; ++d)
    for (int order = 0; order <= 6 && cardinality; ++order)
      for_each_multi_index(d, order, [&](const MultiIndex& k) {
        int total = 0;
        for (int v : k.levels) total += v;
        if (total == order && enumerate_block(k).size() != (std::size_t{1} << order)) cardinality = false;
      });
  bool binomials = true;
  for (int d = 1; d <= 5; ++d)
    for (int l = d; l <= 20; ++l) {
      double s = 0.0;
      for (int i = d; i <= l; ++i) s += binomial(i - 1, d - 1);
      if (s != binomial(l, d)) binomials = false;
    }
  const bool ok = worst < 1e-12 && cardinality && binomials;
  return {"combinatorics", ok,
          fmt("closed-form sum max rel err %.2e", worst) + (cardinality ? ", |rho(k)| = 2^|k|" : ", block cardinality FAILED") +
              (binomials ? ", binomial sums exact" : ", binomial sums FAILED")};
}

CheckResult check_orthonormality() {
  // Fourier: tensor Gauss-Legendre
  double fourier_dev = 0.0;
  {
    const HyperbolicCross cross(2, 3, BasisKind::Fourier);
    const QuadratureRule q = composite_gauss_legendre(8, 16);
    const std::size_t m = q.nodes.size();
    std::vector<double> gram(cross.size() * cross.size(), 0.0);
    std::vector<double> vals(cross.size());
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const std::vector<double> x{q.nodes[a], q.nodes[b]};
        cross.for_each([&](const MultiIndex& k, const FrequencyIndex& s, std::size_t i) {
          vals[i] = eval_basis(BasisKind::Fourier, k, s, x);
        });
        const double w = q.weights[a] * q.weights[b];
        for (std::size_t i = 0; i < vals.size(); ++i)
          for (std::size_t j = 0; j < vals.size(); ++j) gram[i * vals.size() + j] += w * vals[i] * vals[j];
      }
    for (std::size_t i = 0; i < cross.size(); ++i)
      for (std::size_t j = 0; j < cross.size(); ++j)
        fourier_dev = std::max(fourier_dev, std::abs(gram[i * cross.size() + j] - (i == j ? 1.0 : 0.0)));
  }
  // Haar: midpoints of the finest dyadic cells integrate the products exactly
  double haar_dev = 0.0;
  {
    const int level = 3;
    const HyperbolicCross cross(2, level, BasisKind::HaarWavelet);
    const int cells = 1 << (level + 1);
    std::vector<double> gram(cross.size() * cross.size(), 0.0);
    std::vector<double> vals(cross.size());
    for (int a = 0; a < cells; ++a)
      for (int b = 0; b < cells; ++b) {
        const std::vector<double> x{(a + 0.5) / cells, (b + 0.5) / cells};
        cross.for_each([&](const MultiIndex& k, const FrequencyIndex& s, std::size_t i) {
          vals[i] = eval_basis(BasisKind::HaarWavelet, k, s, x);
        });
        for (std::size_t i = 0; i < vals.size(); ++i)
          for (std::size_t j = 0; j < vals.size(); ++j) gram[i * vals.size() + j] += vals[i] * vals[j];
      }
    const double area = 1.0 / (static_cast<double>(cells) * cells);
    for (std::size_t i = 0; i < cross.size(); ++i)
      for (std::size_t j = 0; j < cross.size(); ++j)
        haar_dev = std::max(haar_dev, std::abs(gram[i * cross.size() + j] * area - (i == j ? 1.0 : 0.0)));
  }
  return {"orthonormality", fourier_dev < 1e-8 && haar_dev < 1e-12,
          fmt("fourier gram dev %.2e", fourier_dev) + fmt(", haar gram dev %.2e", haar_dev)};
}

CheckResult check_coefficient_layout(std::uint64_t seed, bool corrupt) {
  double worst = 0.0;
  for (BasisKind basis : {BasisKind::Fourier, BasisKind::HaarWavelet}) {
    const auto samples = draw(ProductBeta{{2.0, 3.0}, {5.0, 2.0}}, 64, derive_seed(seed, 1));
    Wahba policy;
    policy.level = 3;
    AhceModel model = fit(samples, basis, policy);
    if (corrupt) {
      auto raw = model.raw();
      std::swap(raw[1], raw[2]);
      model = AhceModel(std::make_shared<const HyperbolicCross>(model.cross()), model.policy(), model.n(), raw,
                        model.multipliers());
    }
    // every flat slot holds the sample mean of the basis function the layout names
    model.cross().for_each([&](const MultiIndex& k, const FrequencyIndex& s, std::size_t flat) {
      double mean = 0.0;
      for (std::size_t i = 0; i < samples.rows(); ++i) mean += eval_basis(basis, k, s, samples.row(i));
      mean /= static_cast<double>(samples.rows());
      worst = std::max(worst, std::abs(mean - model.raw()[flat]));
    });
  }
  return {"coefficient layout", worst < 1e-12, fmt("max |slot - sample mean| %.2e", worst)};
}

CheckResult check_smoothing_identity(int triples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < triples; ++t) {
    const int dim = 1 + t % 3;
    const int level = 1 + (t / 3) % 3;
    const std::size_t n = 20 + static_cast<std::size_t>(uniform01(rng) * 60);
    const auto samples = draw(Uniform{dim}, n, derive_seed(seed, static_cast<std::uint64_t>(t)));
    BasisKind basis;
    SmoothingPolicy policy;
    switch (t % 4) {
      case 0: basis = BasisKind::Fourier; policy = TruncationFourier{1.0, 0.0, 0.05 + uniform01(rng)}; break;
      case 1: basis = BasisKind::HaarWavelet; policy = TruncationWavelet{1.0, 0.0, 0.05 + uniform01(rng)}; break;
      case 2: basis = BasisKind::Fourier; policy = Wahba{0.5 + uniform01(rng), std::nullopt, level}; break;
      default: basis = BasisKind::HaarWavelet; policy = Wahba{0.5 + uniform01(rng), 2.0 * uniform01(rng), level}; break;
    }
    const auto model = fit(samples, basis, policy);
    const auto f = random_table(rng, dim, std::min(level + 1, model.level() + 1), basis);
    const auto [lhs, rhs] = smoothing_identity_check(model, f, samples);
    worst = std::max(worst, rel_err(lhs, rhs));
  }
  return {"smoothing identity", worst < 1e-10, std::to_string(triples) + fmt(" triples, max rel err %.2e", worst)};
}

CheckResult check_variance_oracle(int instances, std::uint64_t seed) {
  double worst = 0.0;
  for (int inst = 0; inst < instances; ++inst) {
    const std::size_t n = 5 + static_cast<std::size_t>((inst / 2) % 8);
    const auto samples = draw(Uniform{2}, n, derive_seed(seed, static_cast<std::uint64_t>(inst)));
    const BasisKind basis = inst % 2 == 0 ? BasisKind::HaarWavelet : BasisKind::Fourier;
    std::vector<double> g(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) g[i * n + j] = kernel_H(samples.row(i), samples.row(j), basis, 2);
    double s1 = 0.0, s3 = 0.0, s4 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        s1 += g[i * n + j] * g[i * n + j];
        for (std::size_t k = 0; k < n; ++k)
          if (k != i && k != j) s3 += g[i * n + j] * g[i * n + k];
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b)
            if (a != b && a != i && a != j && b != i && b != j) s4 += g[i * n + j] * g[a * n + b];
      }
    const double nn = static_cast<double>(n);
    const double brute = s1 / (nn * (nn - 1)) - 2.0 * s3 / (nn * (nn - 1) * (nn - 2)) +
                         s4 / (nn * (nn - 1) * (nn - 2) * (nn - 3));
    const double fast = variance_terms(g, n).sigma2();
    worst = std::max(worst, std::abs(fast - brute) / std::max(std::abs(brute), 1e-300));
  }
  return {"variance oracle", worst < 1e-10, std::to_string(instances) + fmt(" instances, max rel err %.2e", worst)};
}

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options) {
  std::vector<CheckResult> out;
  out.push_back(check_combinatorics());
  out.push_back(check_orthonormality());
  out.push_back(check_coefficient_layout(options.seed, options.corrupt_layout));
  out.push_back(check_smoothing_identity(1000, options.seed));
  out.push_back(check_variance_oracle(50, options.seed));
  return out;
}

}  // namespace hxd
