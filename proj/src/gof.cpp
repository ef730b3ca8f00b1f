#include "hxd/gof.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hxd/ahce.hpp"
#include "hxd/detail/exact_sum.hpp"
#include "hxd/io.hpp"
#include "hxd/parallel.hpp"
#include "hxd/policy.hpp"
#include "hxd/rng.hpp"

namespace hxd {

namespace {

constexpr int kMaxKernelLevel = 60;
constexpr std::size_t kMaxStoredGram = 20000;

// Per-dimension level values v[0..len) with the kernel equal to the sum over
// |k| <= level of prod_j v_j[k_j]: the coefficient sum of a truncated
// polynomial product.
struct LevelWork {
  std::vector<double> poly;
  std::vector<double> next;

  explicit LevelWork(int level) : poly(static_cast<std::size_t>(level) + 1), next(static_cast<std::size_t>(level) + 1) {}

  void start(const double* v, int len, int level) {
    std::fill(poly.begin(), poly.end(), 0.0);
    for (int d = 0; d < std::min(len, level + 1); ++d) poly[static_cast<std::size_t>(d)] = v[d];
    top = std::min(len, level + 1) - 1;
  }

  void multiply(const double* v, int len, int level) {
    const int new_top = std::min(top + len - 1, level);
    for (int d = 0; d <= new_top; ++d) {
      double acc = 0.0;
      const int lo = std::max(0, d - top);
      const int hi = std::min(d, len - 1);
      for (int b = lo; b <= hi; ++b) acc += poly[static_cast<std::size_t>(d - b)] * v[b];
      next[static_cast<std::size_t>(d)] = acc;
    }
    for (int d = 0; d <= new_top; ++d) poly[static_cast<std::size_t>(d)] = next[static_cast<std::size_t>(d)];
    top = new_top;
  }

  double total() const {
    double s = 0.0;
    for (int d = 0; d <= top; ++d) s += poly[static_cast<std::size_t>(d)];
    return s;
  }

  int top = 0;
};

// Sum over t in [lo, hi) of cos(t theta).
double cos_block_sum(int lo, int hi, double theta) {
  const double half = std::sin(0.5 * theta);
  if (std::abs(half) < 1e-3) {
    double s = 0.0;
    for (int t = lo; t < hi; ++t) s += std::cos(t * theta);
    return s;
  }
  return (std::sin((hi - 0.5) * theta) - std::sin((lo - 0.5) * theta)) / (2.0 * half);
}

// Fills v[0..level] with the 1-D level kernels h_k(x, y); returns the count of
// leading entries that can be non-zero.
int level_kernel_1d(BasisKind basis, int level, double x, double y, double* v) {
  if (basis == BasisKind::HaarWavelet) {
    const long cx = dyadic_cell(x, level + 1);
    const long cy = dyadic_cell(y, level + 1);
    const double px = (cx >> level) == 0 ? 1.0 : -1.0;
    const double py = (cy >> level) == 0 ? 1.0 : -1.0;
    v[0] = 1.0 + px * py;
    for (int k = 1; k <= level; ++k) {
      const long ax = cx >> (level - k);
      const long ay = cy >> (level - k);
      if ((ax >> 1) != (ay >> 1)) return k;
      v[k] = std::ldexp((ax & 1) == (ay & 1) ? 1.0 : -1.0, k);
    }
    return level + 1;
  }
  const double theta = 2.0 * std::numbers::pi * std::abs(x - y);
  v[0] = 1.0;
  for (int k = 1; k <= level; ++k) v[k] = 2.0 * cos_block_sum(1 << (k - 1), 1 << k, theta);
  return level + 1;
}

void check_level(int level) {
  if (level < 0) throw std::invalid_argument("GOF level must be >= 0");
  if (level > kMaxKernelLevel) throw std::invalid_argument("GOF level too large");
}

// Kernel evaluator with reusable buffers.
class KernelEval {
 public:
  KernelEval(BasisKind basis, int dim, int level)
      : basis_(basis), dim_(dim), level_(level), vals_(static_cast<std::size_t>(level + 1) * dim), work_(level) {}

  double operator()(Point x, Point y) {
    const std::size_t stride = static_cast<std::size_t>(level_) + 1;
    for (int j = 0; j < dim_; ++j) {
      double* v = vals_.data() + stride * static_cast<std::size_t>(j);
      const int len = level_kernel_1d(basis_, level_, x[static_cast<std::size_t>(j)], y[static_cast<std::size_t>(j)], v);
      if (j == 0) {
        work_.start(v, len, level_);
      } else {
        work_.multiply(v, len, level_);
      }
    }
    return work_.total();
  }

 private:
  BasisKind basis_;
  int dim_;
  int level_;
  std::vector<double> vals_;
  LevelWork work_;
};

// Row-wise access to the zero-diagonal Gram matrix, stored when small
// enough and recomputed per row otherwise.
class Gram {
 public:
  Gram(const SampleMatrix& samples, BasisKind basis, int level)
      : samples_(samples), basis_(basis), level_(level), n_(samples.rows()) {
    if (n_ <= kMaxStoredGram) {
      data_.assign(n_ * n_, 0.0);
      parallel_for(n_, [&](std::size_t i) {
        KernelEval h(basis_, static_cast<int>(samples_.dim()), level_);
        for (std::size_t j = i + 1; j < n_; ++j) {
          const double v = h(samples_.row(i), samples_.row(j));
          data_[i * n_ + j] = v;
          data_[j * n_ + i] = v;
        }
      });
    }
  }

  std::size_t n() const { return n_; }
  bool stored() const { return !data_.empty() || n_ == 0; }

  /// Row i; `buffer` is used when the matrix is not stored.
  std::span<const double> row(std::size_t i, std::vector<double>& buffer) const {
    if (stored()) return {data_.data() + i * n_, n_};
    buffer.assign(n_, 0.0);
    KernelEval h(basis_, static_cast<int>(samples_.dim()), level_);
    for (std::size_t j = 0; j < n_; ++j)
      if (j != i) buffer[j] = h(samples_.row(i), samples_.row(j));
    return buffer;
  }

  std::span<const double> data() const { return data_; }

 private:
  const SampleMatrix& samples_;
  BasisKind basis_;
  int level_;
  std::size_t n_;
  std::vector<double> data_;
};

std::vector<double> null_means(const SampleMatrix& samples, const NullDensity& p0, int level) {
  std::vector<double> g(samples.rows());
  parallel_for(samples.rows(), [&](std::size_t i) { g[i] = p0.mean_kernel(samples.row(i), level); });
  return g;
}

double centered_statistic(const Gram& gram, const std::vector<double>& g, double c) {
  const std::size_t n = gram.n();
  const double nn = static_cast<double>(n);
  std::vector<detail::ExactSum> rows(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> buffer;
    const auto r = gram.row(i, buffer);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) rows[i].add(r[j]);
    rows[i].add(-2.0 * (nn - 1.0) * g[i]);
  });
  detail::ExactSum total;
  for (auto& r : rows) total.add(r);
  total.add(nn * (nn - 1.0) * c);
  return total.value() / (nn * (nn - 1.0));
}

std::vector<signed char> sign_chain(std::size_t n, double flip_prob, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<signed char> s(n);
  if (n == 0) return s;
  s[0] = 1;
  for (std::size_t j = 1; j < n; ++j) {
    const double u = uniform01(rng);
    s[j] = u < flip_prob ? static_cast<signed char>(-s[j - 1]) : s[j - 1];
  }
  return s;
}

// Bootstrap replicates over a Gram matrix, optionally centred by g and c.
std::vector<double> bootstrap_from_gram(const Gram& gram, const GofConfig& cfg, const std::vector<double>* g,
                                        double c) {
  if (cfg.bootstrap_reps < 1) throw std::invalid_argument("wild_bootstrap: B must be >= 1");
  if (!(cfg.flip_prob >= 0.0 && cfg.flip_prob <= 1.0))
    throw std::invalid_argument("wild_bootstrap: flip probability must lie in [0,1]");
  const std::size_t n = gram.n();
  const std::size_t reps = static_cast<std::size_t>(cfg.bootstrap_reps);
  const double norm = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  std::vector<std::vector<signed char>> signs(reps);
  for (std::size_t b = 0; b < reps; ++b) signs[b] = sign_chain(n, cfg.flip_prob, derive_seed(cfg.seed, b));

  auto centred_row = [&](std::size_t i, std::span<const double> r, std::vector<double>& out) {
    out.resize(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = j == i ? 0.0 : r[j] - (*g)[i] - (*g)[j] + c;
  };

  std::vector<double> acc(reps, 0.0);
  if (gram.stored()) {
    parallel_for(reps, [&](std::size_t b) {
      const auto& s = signs[b];
      std::vector<double> sd(s.begin(), s.end());
      std::vector<double> buffer, centred;
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        auto r = gram.row(i, buffer);
        if (g) {
          centred_row(i, r, centred);
          r = centred;
        }
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += r[j] * sd[j];
        total += sd[i] * dot;
      }
      acc[b] = total;
    });
  } else {
    std::vector<double> buffer, centred;
    for (std::size_t i = 0; i < n; ++i) {
      auto r = gram.row(i, buffer);
      if (g) {
        centred_row(i, r, centred);
        r = centred;
      }
      parallel_for(reps, [&](std::size_t b) {
        const auto& s = signs[b];
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += r[j] * static_cast<double>(s[j]);
        acc[b] += static_cast<double>(s[i]) * dot;
      });
    }
  }
  for (auto& a : acc) a /= norm;
  return acc;
}

VarianceTerms terms_from_rows(std::size_t n, const std::function<std::span<const double>(std::size_t, std::vector<double>&)>& row) {
  if (n < 5) throw std::invalid_argument("variance estimator: requires n >= 5");
  std::vector<detail::ExactSum> sq(n);
  std::vector<double> rsum(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> buffer;
    const auto r = row(i, buffer);
    detail::ExactSum s;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      s.add(r[j]);
      sq[i].add(r[j] * r[j]);
    }
    rsum[i] = s.value();
  });
  detail::ExactSum s1_acc, r2_acc, total_acc;
  for (std::size_t i = 0; i < n; ++i) {
    s1_acc.add(sq[i]);
    r2_acc.add(rsum[i] * rsum[i]);
    total_acc.add(rsum[i]);
  }
  const long double s1 = s1_acc.value();
  const long double r2 = r2_acc.value();
  const long double total = total_acc.value();
  const long double s2 = r2 - s1;
  const long double s4 = total * total - 4.0L * s2 - 2.0L * s1;
  const long double nn = static_cast<long double>(n);
  VarianceTerms t;
  t.pairs = static_cast<double>(s1 / (nn * (nn - 1)));
  t.triples = static_cast<double>(2.0L * s2 / (nn * (nn - 1) * (nn - 2)));
  t.quads = static_cast<double>(s4 / (nn * (nn - 1) * (nn - 2) * (nn - 3)));
  return t;
}

VarianceTerms terms_from_gram(const Gram& gram) {
  return terms_from_rows(gram.n(), [&](std::size_t i, std::vector<double>& buf) { return gram.row(i, buf); });
}

void check_gof_samples(const SampleMatrix& samples) {
  if (samples.rows() < 2) throw std::invalid_argument("GOF test: requires n >= 2");
  if (!samples.in_unit_cube()) throw OutOfCubeError("observations must lie in [0,1]^D");
}

}  // namespace

int gof_level(const GofConfig& cfg, std::size_t n, int dim) {
  if (cfg.level) {
    check_level(*cfg.level);
    return *cfg.level;
  }
  const int l = select_level(TruncationWavelet{cfg.alpha, 0.0, 1.0}, n, dim);
  return std::min(l, kMaxKernelLevel);
}

// --- null density ----------------------------------------------------------------

NullDensity::NullDensity(ProductCoefficients product) : rep_(std::move(product)) {}
NullDensity::NullDensity(CoefficientTable table) : rep_(std::move(table)) {}

NullDensity NullDensity::uniform(BasisKind basis, int dim, int level) {
  std::vector<int> zeros(static_cast<std::size_t>(dim), 0);
  return NullDensity(CoefficientTable(basis, dim, level, {{MultiIndex(zeros), FrequencyIndex(zeros), 1.0}}));
}

BasisKind NullDensity::basis() const {
  return std::visit([](const auto& r) { return r.basis(); }, rep_);
}
int NullDensity::dim() const {
  return std::visit([](const auto& r) { return r.dim(); }, rep_);
}
int NullDensity::level() const {
  return std::visit([](const auto& r) { return r.level(); }, rep_);
}

void NullDensity::check(BasisKind basis, int dim, int level) const {
  if (this->basis() != basis) throw std::invalid_argument("null density: basis mismatch");
  if (this->dim() != dim) throw std::invalid_argument("null density: dimension mismatch");
  if (this->level() < level) throw std::invalid_argument("null density: level below the test level");
}

double NullDensity::mean_kernel(Point x, int level) const {
  if (const auto* pc = std::get_if<ProductCoefficients>(&rep_)) {
    const std::size_t stride = static_cast<std::size_t>(level) + 1;
    std::vector<double> v(stride * static_cast<std::size_t>(pc->dim()));
    LevelWork work(level);
    for (int j = 0; j < pc->dim(); ++j) {
      double* vj = v.data() + stride * static_cast<std::size_t>(j);
      for (int k = 0; k <= level; ++k) vj[k] = pc->level_mean(j, k, x[static_cast<std::size_t>(j)]);
      if (j == 0) {
        work.start(vj, level + 1, level);
      } else {
        work.multiply(vj, level + 1, level);
      }
    }
    return work.total();
  }
  const auto& t = std::get<CoefficientTable>(rep_);
  double total = 0.0;
  for (const auto& e : t.entries())
    if (e.k.order() <= level) total += e.value * eval_basis(t.basis(), e.k, e.s, x);
  return total;
}

double NullDensity::energy(int level) const {
  if (const auto* pc = std::get_if<ProductCoefficients>(&rep_)) {
    std::vector<double> v(static_cast<std::size_t>(level) + 1);
    LevelWork work(level);
    for (int j = 0; j < pc->dim(); ++j) {
      for (int k = 0; k <= level; ++k) v[static_cast<std::size_t>(k)] = pc->level_energy(j, k);
      if (j == 0) {
        work.start(v.data(), level + 1, level);
      } else {
        work.multiply(v.data(), level + 1, level);
      }
    }
    return work.total();
  }
  const auto& t = std::get<CoefficientTable>(rep_);
  double total = 0.0;
  for (const auto& e : t.entries())
    if (e.k.order() <= level) total += e.value * e.value;
  return total;
}

// --- kernels -----------------------------------------------------------------------

double kernel_H(Point x, Point y, BasisKind basis, int level) {
  check_level(level);
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("kernel_H: dimension mismatch");
  KernelEval h(basis, static_cast<int>(x.size()), level);
  return h(x, y);
}

double kernel_H(Point x, Point y, const GofConfig& cfg) {
  if (!cfg.level) throw std::invalid_argument("kernel_H: the configuration has no level");
  return kernel_H(x, y, cfg.basis, *cfg.level);
}

double centered_kernel(Point x, Point y, const NullDensity& p0, const GofConfig& cfg) {
  if (!cfg.level) throw std::invalid_argument("centered_kernel: the configuration has no level");
  const int level = *cfg.level;
  p0.check(cfg.basis, static_cast<int>(x.size()), level);
  return kernel_H(x, y, cfg.basis, level) - p0.mean_kernel(x, level) - p0.mean_kernel(y, level) + p0.energy(level);
}

double statistic_T(const SampleMatrix& samples, const NullDensity& p0, const GofConfig& cfg) {
  check_gof_samples(samples);
  const int level = gof_level(cfg, samples.rows(), static_cast<int>(samples.dim()));
  p0.check(cfg.basis, static_cast<int>(samples.dim()), level);
  const Gram gram(samples, cfg.basis, level);
  return centered_statistic(gram, null_means(samples, p0, level), p0.energy(level));
}

std::vector<double> wild_bootstrap(const SampleMatrix& samples, const GofConfig& cfg) {
  check_gof_samples(samples);
  if (cfg.center_bootstrap) throw std::invalid_argument("wild_bootstrap: centring needs a null density; use run_test");
  const int level = gof_level(cfg, samples.rows(), static_cast<int>(samples.dim()));
  const Gram gram(samples, cfg.basis, level);
  return bootstrap_from_gram(gram, cfg, nullptr, 0.0);
}

VarianceTerms variance_terms(std::span<const double> gram, std::size_t n) {
  if (gram.size() != n * n) throw std::invalid_argument("variance_terms: Gram matrix size mismatch");
  return terms_from_rows(n, [&](std::size_t i, std::vector<double>&) { return gram.subspan(i * n, n); });
}

double variance_estimator(const SampleMatrix& samples, const GofConfig& cfg) {
  check_gof_samples(samples);
  if (samples.rows() < 5) throw std::invalid_argument("variance estimator: requires n >= 5");
  const int level = gof_level(cfg, samples.rows(), static_cast<int>(samples.dim()));
  const Gram gram(samples, cfg.basis, level);
  return std::sqrt(std::max(0.0, terms_from_gram(gram).sigma2()));
}

double bootstrap_threshold(std::vector<double> stats, double significance) {
  if (stats.empty()) throw std::invalid_argument("bootstrap_threshold: no replicates");
  if (!(significance > 0.0 && significance < 1.0))
    throw std::invalid_argument("bootstrap_threshold: significance must lie in (0,1)");
  std::sort(stats.begin(), stats.end());
  const double b = static_cast<double>(stats.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - significance) * b - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, stats.size());
  return stats[rank - 1];
}

GofTestRun run_test(const SampleMatrix& samples, const NullDensity& p0, const GofConfig& cfg) {
  check_gof_samples(samples);
  const std::size_t n = samples.rows();
  const int dim = static_cast<int>(samples.dim());
  const int level = gof_level(cfg, n, dim);
  p0.check(cfg.basis, dim, level);

  const Gram gram(samples, cfg.basis, level);
  const auto g = null_means(samples, p0, level);
  const double c = p0.energy(level);

  GofTestRun run;
  run.n = n;
  run.dim = dim;
  run.level = level;
  run.seed = cfg.seed;
  run.statistic = centered_statistic(gram, g, c);
  run.bootstrap_stats = bootstrap_from_gram(gram, cfg, cfg.center_bootstrap ? &g : nullptr, c);
  run.threshold = bootstrap_threshold(run.bootstrap_stats, cfg.significance);
  run.reject = run.statistic > run.threshold;
  run.z_score = std::numeric_limits<double>::quiet_NaN();
  if (n >= 5) {
    run.sigma_hat = std::sqrt(std::max(0.0, terms_from_gram(gram).sigma2()));
    if (run.sigma_hat > 0.0) run.z_score = static_cast<double>(n) * run.statistic / (std::numbers::sqrt2 * run.sigma_hat);
  }
  return run;
}

std::string gof_csv_header() { return "n,D,l,T_n,threshold,reject,z_score,sigma_hat,seed"; }

std::string gof_csv_row(const GofTestRun& run) {
  return std::to_string(run.n) + "," + std::to_string(run.dim) + "," + std::to_string(run.level) + "," +
         format_double(run.statistic) + "," + format_double(run.threshold) + "," + (run.reject ? "1" : "0") + "," +
         format_double(run.z_score) + "," + format_double(run.sigma_hat) + "," + std::to_string(run.seed);
}

}  // namespace hxd
