#pragma once

#include <span>

#include "hxd/basis.hpp"
#include "hxd/hypercross.hpp"

namespace hxd::detail {

/// Calls fn(flat, value) for every basis function of `cross` that is non-zero
/// at a point whose per-dimension 1-D values are `vals`.
template <class Fn>
void visit_cross(const HyperbolicCross& cross, std::span<const Basis1dValues> vals, Fn&& fn) {
  const std::size_t dim = static_cast<std::size_t>(cross.dim());
  for (const auto& b : cross.blocks()) {
    auto rec = [&](auto& self, std::size_t j, double partial, std::size_t flat) -> void {
      const auto& list = vals[j].by_level[static_cast<std::size_t>(b.k[j])];
      const std::size_t stride = b.strides[j];
      if (j + 1 == dim) {
        for (const auto& [p, v] : list) fn(flat + p * stride, partial * v);
        return;
      }
      for (const auto& [p, v] : list) {
        const double pv = partial * v;
        if (pv != 0.0) self(self, j + 1, pv, flat + p * stride);
      }
    };
    rec(rec, 0, 1.0, b.offset);
  }
}

}  // namespace hxd::detail
