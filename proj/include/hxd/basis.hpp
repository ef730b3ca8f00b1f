#pragma once

// Pointwise evaluation of the tensor Fourier system, the hyperbolic-cross
// Haar system and cardinal B-splines on [0,1]^D.

#include <span>
#include <utility>
#include <vector>

#include "hxd/hypercross.hpp"

namespace hxd {

using Point = std::span<const double>;

// --- Fourier -------------------------------------------------------------

/// 1 for s = 0, sqrt(2) cos(2 pi s x) for s > 0, sqrt(2) sin(2 pi |s| x) for s < 0.
double fourier_1d(int s, double x);
double eval_fourier(const FrequencyIndex& s, Point x);

// --- Haar ----------------------------------------------------------------

/// phi_{0,0} = 1, phi_{0,1} = psi, phi_{k,s} = 2^{k/2} psi(2^k x - s) for k >= 1.
/// The right endpoint x = 1 belongs to the last cell. Throws for an s outside
/// the translation range of level k.
double haar_1d(int k, int s, double x);
double eval_haar(const MultiIndex& k, const FrequencyIndex& s, Point x);

/// Dyadic cell of x at resolution 2^-m, with x = 1 mapped to the last cell.
long dyadic_cell(double x, int m);

// --- generic -------------------------------------------------------------

double basis_1d(BasisKind kind, int k, int s, double x);
double eval_basis(BasisKind kind, const MultiIndex& k, const FrequencyIndex& s, Point x);
/// sup norm of phi_{k,s} over [0,1]^D.
double basis_sup_norm(BasisKind kind, const MultiIndex& k);

/// Non-zero 1-D basis values of one coordinate, grouped by level: for each
/// level k <= max_level, the (position-in-block, value) pairs. Fourier lists
/// are dense; Haar lists hold at most two entries.
struct Basis1dValues {
  std::vector<std::vector<std::pair<std::size_t, double>>> by_level;
};

Basis1dValues basis_values_1d(BasisKind kind, int max_level, double x);

// --- cardinal B-splines --------------------------------------------------

/// N_alpha: (alpha+1)-fold convolution of the indicator of [0,1), supported
/// on [0, alpha+1].
double cardinal_bspline(int alpha, double x);

struct BSplineSpec {
  int order = 0;             // alpha
  int level = 0;             // k
  std::vector<int> shift;    // s, one entry per dimension
};

/// M^{D,alpha}_{k,s}(x) = prod_j N_alpha(2^k x_j - s_j).
double eval_bspline(const BSplineSpec& spec, Point x);

}  // namespace hxd
