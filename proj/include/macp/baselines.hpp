#pragma once

#include <cstddef>
#include <cstdint>

#include "macp/dense_matrix.hpp"
#include "macp/spectral_adapter.hpp"

namespace macp {

/// delta = scale * b * a with a: r x d_1, b: d_2 x r.
struct LowRankState {
  DenseMatrix a;
  DenseMatrix b;
  std::size_t rank = 0;
  double scale = 1.0;

  std::size_t trainable_count() const noexcept { return a.size() + b.size(); }
};

struct LowRankGrads {
  DenseMatrix grad_a;
  DenseMatrix grad_b;
};

/// a Kaiming-uniform (fan_in = d_1), b zero, so the delta is zero at step 0.
/// Throws InvalidArgument unless 1 <= r <= min(d_1, d_2).
LowRankState lowrank_init(std::size_t d_1, std::size_t d_2, std::size_t r, std::uint64_t seed);

DenseMatrix lowrank_delta(const LowRankState& state);

/// grad_a = scale * b^T G, grad_b = scale * G a^T.
LowRankGrads lowrank_grads(const LowRankState& state, const DenseMatrix& grad_delta_w);

/// Spectral adapter whose n coordinates are drawn uniformly without
/// replacement from the whole d_2 x d_1 grid, ignoring bands and energy.
using RandomSpectralState = AdapterState;

/// Coordinates come from a partial Fisher-Yates shuffle over the row-major
/// cell list; coefficients are Kaiming-uniform as for init_adapter. Band
/// labels use the three_band geometry for reporting only.
RandomSpectralState random_spectral_init(std::size_t d_1, std::size_t d_2, std::size_t n,
                                         double alpha, std::uint64_t seed,
                                         CoeffInit init = CoeffInit::kKaimingUniform);

}  // namespace macp
