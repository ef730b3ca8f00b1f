#pragma once

// Synthetic distributions on [0,1]^D with exact densities: product Beta,
// Beta shifted by a uniform perturbation, t-mapped and uniform.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "hxd/basis.hpp"
#include "hxd/sample_matrix.hpp"
#include "hxd/spectral.hpp"

namespace hxd {

struct ProductBeta {
  std::vector<double> a;
  std::vector<double> b;
};

/// Coordinates t(dof) pushed through the t cdf, hence uniform marginals.
struct StudentTMapped {
  double dof = 3.0;
  int dim = 1;
};

/// X = X0 + shift U per coordinate, X0 ~ Beta(a, b), U ~ Unif[0,1]. Draws
/// above 1 are either clamped to 1 (an atom at the boundary) or redrawn.
/// `density` is the convolution renormalised to [0,1] in both modes, which is
/// the exact law of the redrawn variant and the continuous part of the clamped one.
struct BetaPlusUniform {
  enum class Boundary { Clamp, Truncate };
  std::vector<double> a;
  std::vector<double> b;
  double shift = 0.2;
  Boundary boundary = Boundary::Clamp;
};

struct Uniform {
  int dim = 1;
};

using SyntheticDist = std::variant<ProductBeta, StudentTMapped, BetaPlusUniform, Uniform>;

int dist_dim(const SyntheticDist& dist);
std::string dist_name(const SyntheticDist& dist);
/// Throws std::invalid_argument for non-positive or inconsistent parameters.
void validate(const SyntheticDist& dist);

SampleMatrix draw(const SyntheticDist& dist, std::size_t n, std::uint64_t seed);
double density(const SyntheticDist& dist, Point x);

/// P(X0 + shift U > 1) for coordinate j: the mass of the boundary atom when clamping.
double boundary_mass(const BetaPlusUniform& dist, std::size_t j);

/// Per-coordinate marginal density and distribution function.
std::vector<Marginal1d> marginals(const SyntheticDist& dist);

/// Headerless CSV, one observation per row.
void write_samples_csv(std::ostream& out, const SampleMatrix& s);
SampleMatrix read_samples_csv(std::istream& in);

}  // namespace hxd
