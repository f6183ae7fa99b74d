#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "macp/dense_matrix.hpp"
#include "macp/selection.hpp"

namespace macp {

enum class CoeffInit { kKaimingUniform, kZero };

/// Trainable state of one cosine-projection adapter on a rows x cols
/// (d_2 output x d_1 input) weight. Only `coeffs` is trainable; every
/// spectral cell outside `plan` is implicitly zero.
struct AdapterState {
  SelectionPlan plan;
  std::vector<double> coeffs;
  double alpha = 1.0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t trainable_count() const noexcept { return coeffs.size(); }
  friend bool operator==(const AdapterState&, const AdapterState&) = default;
};

/// Kaiming-uniform bound sqrt(6 / fan_in).
double kaiming_bound(std::size_t fan_in);

/// Builds the plan from the base weight spectrum and initializes the
/// coefficients (Kaiming-uniform with fan_in = cols by default).
AdapterState init_adapter(const DenseMatrix& base_weight, PartitionScheme scheme,
                          std::size_t n, double delta, double alpha, std::uint64_t seed,
                          CoeffInit init = CoeffInit::kKaimingUniform);

/// Throws on an inconsistent state (length mismatch, bad alpha, coords off-grid).
void validate(const AdapterState& state);

/// Scatter of the coefficients into an otherwise zero spectrum.
DenseMatrix scatter_spectrum(const AdapterState& state);

/// alpha * idct2(scatter(coeffs)).
DenseMatrix delta_weight(const AdapterState& state);

/// (base_weight + delta_weight) * x.
std::vector<double> forward(const AdapterState& state, const DenseMatrix& base_weight,
                            std::span<const double> x);

/// dL/dc given dL/d(delta_weight): alpha * gather(dct2(grad), coords). The
/// inverse transform is orthonormal, so its adjoint is the forward transform.
std::vector<double> grad_coeffs(const AdapterState& state, const DenseMatrix& grad_delta_w);

/// base_weight + delta_weight.
DenseMatrix merge(const AdapterState& state, const DenseMatrix& base_weight);

}  // namespace macp
