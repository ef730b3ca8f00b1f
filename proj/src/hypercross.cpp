#include "hxd/hypercross.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hxd {

MultiIndex::MultiIndex(std::vector<int> v) : levels(std::move(v)) {
  for (int k : levels) {
    if (k < 0) throw std::invalid_argument("MultiIndex: negative level");
  }
}

int MultiIndex::order() const { return std::accumulate(levels.begin(), levels.end(), 0); }

std::string to_string(BasisKind kind) {
  return kind == BasisKind::Fourier ? "fourier" : "haar";
}

BasisKind basis_from_string(const std::string& name) {
  if (name == "fourier") return BasisKind::Fourier;
  if (name == "haar" || name == "wavelet") return BasisKind::HaarWavelet;
  throw std::invalid_argument("unknown basis '" + name + "'");
}

std::vector<int> block_indices_1d(BasisKind kind, int level) {
  if (level < 0) throw std::invalid_argument("negative level");
  std::vector<int> out;
  if (kind == BasisKind::Fourier) {
    if (level == 0) return {0};
    const int lo = 1 << (level - 1);
    const int hi = 1 << level;
    out.reserve(static_cast<std::size_t>(hi));
    for (int s = -(hi - 1); s <= -lo; ++s) out.push_back(s);
    for (int s = lo; s < hi; ++s) out.push_back(s);
    return out;
  }
  if (level == 0) return {0, 1};
  const int count = 1 << level;
  out.resize(static_cast<std::size_t>(count));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::size_t block_size_1d(BasisKind kind, int level) {
  if (kind == BasisKind::Fourier) return level == 0 ? 1 : (std::size_t{1} << level);
  return level == 0 ? 2 : (std::size_t{1} << level);
}

long block_position_1d(BasisKind kind, int level, int s) {
  if (kind == BasisKind::Fourier) {
    if (level == 0) return s == 0 ? 0 : -1;
    const int lo = 1 << (level - 1);
    const int hi = 1 << level;
    const int a = std::abs(s);
    if (a < lo || a >= hi) return -1;
    // negatives occupy [0, lo) in the order -(hi-1) .. -lo
    if (s < 0) return static_cast<long>(s + hi - 1);
    return static_cast<long>(lo + (s - lo));
  }
  const long size = static_cast<long>(block_size_1d(kind, level));
  if (s < 0 || s >= size) return -1;
  return s;
}

std::vector<FrequencyIndex> enumerate_block(const MultiIndex& k) {
  return enumerate_block(k, BasisKind::Fourier);
}

std::vector<FrequencyIndex> enumerate_block(const MultiIndex& k, BasisKind kind) {
  const std::size_t dim = k.dim();
  std::vector<std::vector<int>> lists(dim);
  std::size_t total = 1;
  for (std::size_t j = 0; j < dim; ++j) {
    lists[j] = block_indices_1d(kind, k[j]);
    total *= lists[j].size();
  }
  std::vector<FrequencyIndex> out;
  out.reserve(total);
  std::vector<std::size_t> pos(dim, 0);
  for (std::size_t t = 0; t < total; ++t) {
    std::vector<int> s(dim);
    for (std::size_t j = 0; j < dim; ++j) s[j] = lists[j][pos[j]];
    out.emplace_back(std::move(s));
    for (std::size_t j = dim; j-- > 0;) {
      if (++pos[j] < lists[j].size()) break;
      pos[j] = 0;
    }
  }
  return out;
}

void for_each_multi_index(int dim, int level, const std::function<void(const MultiIndex&)>& fn) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (level < 0) return;
  MultiIndex k;
  k.levels.assign(static_cast<std::size_t>(dim), 0);
  // odometer over lexicographic order, last coordinate fastest
  int sum = 0;
  while (true) {
    fn(k);
    int j = dim - 1;
    while (j >= 0 && sum >= level) {
      sum -= k.levels[static_cast<std::size_t>(j)];
      k.levels[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) return;
    ++k.levels[static_cast<std::size_t>(j)];
    ++sum;
  }
}

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

std::uint64_t multi_index_count(int dim, int order) {
  return static_cast<std::uint64_t>(binomial(order + dim - 1, dim - 1));
}

HyperbolicCross::HyperbolicCross(int dim, int level, BasisKind kind)
    : dim_(dim), level_(level), kind_(kind) {
  if (dim < 1) throw std::invalid_argument("HyperbolicCross: dimension must be >= 1");
  if (level < 0) throw std::invalid_argument("HyperbolicCross: level must be >= 0");
  for_each_multi_index(dim, level, [&](const MultiIndex& k) {
    CrossBlock b;
    b.k = k;
    b.offset = size_;
    b.sizes.resize(static_cast<std::size_t>(dim));
    b.strides.resize(static_cast<std::size_t>(dim));
    std::size_t stride = 1;
    for (std::size_t j = static_cast<std::size_t>(dim); j-- > 0;) {
      b.sizes[j] = block_size_1d(kind, k[j]);
      b.strides[j] = stride;
      stride *= b.sizes[j];
    }
    b.size = stride;
    size_ += stride;
    blocks_.push_back(std::move(b));
  });
}

long HyperbolicCross::index_of(const MultiIndex& k, const FrequencyIndex& s) const {
  if (k.dim() != static_cast<std::size_t>(dim_) || s.dim() != k.dim()) return -1;
  if (k.order() > level_) return -1;
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), k,
                             [](const CrossBlock& b, const MultiIndex& key) { return b.k < key; });
  if (it == blocks_.end() || it->k != k) return -1;
  std::size_t flat = it->offset;
  for (std::size_t j = 0; j < k.dim(); ++j) {
    const long p = block_position_1d(kind_, k[j], s[j]);
    if (p < 0) return -1;
    flat += static_cast<std::size_t>(p) * it->strides[j];
  }
  return static_cast<long>(flat);
}

std::pair<MultiIndex, FrequencyIndex> HyperbolicCross::at(std::size_t flat) const {
  if (flat >= size_) throw std::out_of_range("HyperbolicCross::at");
  auto it = std::upper_bound(blocks_.begin(), blocks_.end(), flat,
                             [](std::size_t f, const CrossBlock& b) { return f < b.offset; });
  --it;
  std::size_t rem = flat - it->offset;
  std::vector<int> s(static_cast<std::size_t>(dim_));
  for (std::size_t j = 0; j < s.size(); ++j) {
    const std::size_t p = rem / it->strides[j];
    rem %= it->strides[j];
    s[j] = block_indices_1d(kind_, it->k[j])[p];
  }
  return {it->k, FrequencyIndex(std::move(s))};
}

void HyperbolicCross::for_each(
    const std::function<void(const MultiIndex&, const FrequencyIndex&, std::size_t)>& fn) const {
  std::size_t flat = 0;
  for (const auto& b : blocks_) {
    for (const auto& s : enumerate_block(b.k, kind_)) fn(b.k, s, flat++);
  }
}

double cross_cardinality(int dim, int level, BasisKind kind) {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (kind == BasisKind::Fourier) {
    double total = 0.0;
    for (int i = 0; i <= level; ++i)
      total += std::ldexp(1.0, i) * static_cast<double>(multi_index_count(dim, i));
    return total;
  }
  // Haar: per-dimension polynomial in the level, c[t] = sum over |k| = t.
  std::vector<double> poly(static_cast<std::size_t>(level) + 1, 0.0);
  poly[0] = 1.0;
  for (int j = 0; j < dim; ++j) {
    std::vector<double> next(poly.size(), 0.0);
    for (int t = 0; t <= level; ++t) {
      for (int k = 0; k <= t; ++k)
        next[static_cast<std::size_t>(t)] +=
            poly[static_cast<std::size_t>(t - k)] * static_cast<double>(block_size_1d(kind, k));
    }
    poly = std::move(next);
  }
  return std::accumulate(poly.begin(), poly.end(), 0.0);
}

double geometric_binomial_sum_literal(double x, int l, int dim) {
  double total = 0.0;
  for (int i = 0; i < l; ++i) total += std::pow(x, i) * binomial(i + dim - 1, dim - 1);
  return total;
}

double geometric_binomial_sum(double x, int l, int dim) {
  if (x == 1.0) throw std::domain_error("geometric_binomial_sum: closed form is singular at x = 1");
  if (l < 2) throw std::invalid_argument("geometric_binomial_sum: requires l >= 2");
  if (dim < 1) throw std::invalid_argument("geometric_binomial_sum: requires D >= 1");
  const double r = x / (1.0 - x);
  double head = 0.0;
  double tail = 0.0;
  for (int i = 0; i < dim; ++i) head += binomial(dim - 1, i) * std::pow(r, dim - 1 - i);
  for (int j = 0; j < dim; ++j) tail += binomial(l + dim - 1, j) * std::pow(r, dim - 1 - j);
  return head / (1.0 - x) - std::pow(x, l) / (1.0 - x) * tail;
}

double tail_weight(double s, int l, int dim) {
  if (!(s > 0.0)) throw std::domain_error("tail_weight: divergent for s <= 0");
  if (l < 1) throw std::invalid_argument("tail_weight: requires l >= 1");
  if (dim < 1) throw std::invalid_argument("tail_weight: requires D >= 1");
  // sum_{i >= m} x^i C(i+D-1, D-1) with m = l + D and x = 2^{-s}
  const double x = std::exp2(-s);
  const double r = x / (1.0 - x);
  const int m = l + dim;
  double series = 0.0;
  for (int i = 0; i < dim; ++i) series += binomial(m + dim - 1, i) * std::pow(r, dim - 1 - i);
  series /= (1.0 - x);
  return std::exp2(-s * (l + dim)) * series;
}

}  // namespace hxd
