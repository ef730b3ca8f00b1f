#pragma once

// Multi-index combinatorics for hyperbolic crosses: dyadic blocks, level-l
// index sets, cardinalities and the closed-form sums used by the estimates.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hxd {

/// Dyadic level vector k in N^D.
struct MultiIndex {
  std::vector<int> levels;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> v);

  std::size_t dim() const { return levels.size(); }
  /// |k| = sum of levels.
  int order() const;
  int operator[](std::size_t i) const { return levels[i]; }

  auto operator<=>(const MultiIndex&) const = default;
};

/// Signed frequency (Fourier) or translation (Haar) index s in Z^D.
struct FrequencyIndex {
  std::vector<int> entries;

  FrequencyIndex() = default;
  explicit FrequencyIndex(std::vector<int> v) : entries(std::move(v)) {}

  std::size_t dim() const { return entries.size(); }
  int operator[](std::size_t i) const { return entries[i]; }

  auto operator<=>(const FrequencyIndex&) const = default;
};

enum class BasisKind { Fourier, HaarWavelet };

std::string to_string(BasisKind kind);
BasisKind basis_from_string(const std::string& name);

/// One-dimensional block rule: the indices s that belong to level k.
///
/// Fourier: k = 0 -> {0}; k >= 1 -> {s : 2^(k-1) <= |s| < 2^k}, listed in
/// increasing order (negative first).
/// Haar: k = 0 -> {0 (father), 1 (mother)}; k >= 1 -> {0, ..., 2^k - 1}.
std::vector<int> block_indices_1d(BasisKind kind, int level);
std::size_t block_size_1d(BasisKind kind, int level);
/// Position of s inside the 1-D block of `level`, or -1 if absent.
long block_position_1d(BasisKind kind, int level, int s);

/// Every s in rho(k) under the Fourier convention, lexicographic order.
std::vector<FrequencyIndex> enumerate_block(const MultiIndex& k);
/// Same, for an arbitrary basis block rule.
std::vector<FrequencyIndex> enumerate_block(const MultiIndex& k, BasisKind kind);

/// Calls fn(k) for every k in N^D with |k| <= level, lexicographic order.
void for_each_multi_index(int dim, int level, const std::function<void(const MultiIndex&)>& fn);

/// Number of k in N^D with |k| = i, i.e. C(i + D - 1, D - 1).
std::uint64_t multi_index_count(int dim, int order);

double binomial(int n, int k);

/// Block of the cross: the level vector plus its position in the flat layout.
struct CrossBlock {
  MultiIndex k;
  std::size_t offset = 0;               // first flat index of the block
  std::vector<std::size_t> sizes;       // 1-D block size per dimension
  std::vector<std::size_t> strides;     // row-major, last dimension fastest
  std::size_t size = 1;
};

/// Hyperbolic cross {(k, s) : |k| <= level, s in block(k)} with a canonical
/// flat layout: blocks in lexicographic order of k, then s lexicographic.
class HyperbolicCross {
 public:
  HyperbolicCross(int dim, int level, BasisKind kind = BasisKind::Fourier);

  int dim() const { return dim_; }
  int level() const { return level_; }
  BasisKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  std::span<const CrossBlock> blocks() const { return blocks_; }

  /// Flat index of (k, s) or -1 when it is outside the cross.
  long index_of(const MultiIndex& k, const FrequencyIndex& s) const;
  /// (k, s) at a flat index.
  std::pair<MultiIndex, FrequencyIndex> at(std::size_t flat) const;

  /// Streams (k, s, flat) in canonical order without materialising the cross.
  void for_each(const std::function<void(const MultiIndex&, const FrequencyIndex&, std::size_t)>& fn) const;

 private:
  int dim_;
  int level_;
  BasisKind kind_;
  std::size_t size_ = 0;
  std::vector<CrossBlock> blocks_;
};

/// Total index count of a cross computed combinatorially (no enumeration).
/// Fourier: sum_i 2^i C(i+D-1, D-1).
double cross_cardinality(int dim, int level, BasisKind kind = BasisKind::Fourier);

/// Closed form of sum_{i=0}^{l-1} x^i C(i+D-1, D-1). Throws for x == 1 or l < 2.
double geometric_binomial_sum(double x, int l, int dim);
/// The literal sum, for checking and for x == 1.
double geometric_binomial_sum_literal(double x, int l, int dim);

/// Exact tail sum over |k| > l + D - 1 of 2^(-s|k|). Throws for s <= 0.
double tail_weight(double s, int l, int dim);

}  // namespace hxd
