#include "macp/spectral_adapter.hpp"

#include <cmath>
#include <string>

#include "macp/dct.hpp"
#include "macp/errors.hpp"
#include "macp/rng.hpp"

namespace macp {

double kaiming_bound(std::size_t fan_in) {
  if (fan_in == 0) throw InvalidArgument("kaiming_bound: fan_in must be positive");
  return std::sqrt(6.0 / static_cast<double>(fan_in));
}

AdapterState init_adapter(const DenseMatrix& base_weight, PartitionScheme scheme, std::size_t n,
                          double delta, double alpha, std::uint64_t seed, CoeffInit init) {
  if (!std::isfinite(alpha) || alpha == 0.0) {
    throw InvalidArgument("init_adapter: alpha must be finite and nonzero");
  }
  AdapterState state;
  state.plan = plan_from_weights(base_weight, scheme, n, delta, seed);
  state.alpha = alpha;
  state.rows = base_weight.rows();
  state.cols = base_weight.cols();
  state.coeffs.assign(n, 0.0);
  if (init == CoeffInit::kKaimingUniform) {
    const double bound = kaiming_bound(state.cols);
    Rng rng(seed, RngStream::kCoefficientInit);
    for (double& c : state.coeffs) c = rng.uniform(-bound, bound);
  }
  return state;
}

void validate(const AdapterState& state) {
  if (state.rows == 0 || state.cols == 0) throw ShapeError("adapter grid must be non-empty");
  if (state.coeffs.size() != state.plan.coords.size() ||
      state.plan.provenance.size() != state.plan.coords.size() ||
      state.plan.band.size() != state.plan.coords.size()) {
    throw ShapeError("adapter coefficient count does not match its plan");
  }
  if (!std::isfinite(state.alpha) || state.alpha == 0.0) {
    throw InvalidArgument("adapter alpha must be finite and nonzero");
  }
  for (const auto& c : state.plan.coords) {
    if (c.u >= state.rows || c.v >= state.cols) {
      throw ShapeError("plan coordinate (" + std::to_string(c.u) + "," + std::to_string(c.v) +
                       ") lies outside the grid");
    }
  }
}

DenseMatrix scatter_spectrum(const AdapterState& state) {
  DenseMatrix spectrum(state.rows, state.cols);
  for (std::size_t k = 0; k < state.coeffs.size(); ++k) {
    const auto& c = state.plan.coords[k];
    spectrum(c.u, c.v) = state.coeffs[k];
  }
  return spectrum;
}

DenseMatrix delta_weight(const AdapterState& state) {
  DenseMatrix out = idct2(scatter_spectrum(state));
  for (double& v : out.values()) v *= state.alpha;
  return out;
}

std::vector<double> forward(const AdapterState& state, const DenseMatrix& base_weight,
                            std::span<const double> x) {
  if (base_weight.rows() != state.rows || base_weight.cols() != state.cols) {
    throw ShapeError("forward: base weight shape does not match the adapter");
  }
  if (x.size() != state.cols) {
    throw ShapeError("forward: input length " + std::to_string(x.size()) + " != " +
                     std::to_string(state.cols));
  }
  return matvec(merge(state, base_weight), x);
}

std::vector<double> grad_coeffs(const AdapterState& state, const DenseMatrix& grad_delta_w) {
  if (grad_delta_w.rows() != state.rows || grad_delta_w.cols() != state.cols) {
    throw ShapeError("grad_coeffs: gradient shape does not match the adapter");
  }
  const DenseMatrix spectral = dct2(grad_delta_w);
  std::vector<double> grad(state.coeffs.size());
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const auto& c = state.plan.coords[k];
    grad[k] = state.alpha * spectral(c.u, c.v);
  }
  return grad;
}

DenseMatrix merge(const AdapterState& state, const DenseMatrix& base_weight) {
  if (base_weight.rows() != state.rows || base_weight.cols() != state.cols) {
    throw ShapeError("merge: base weight shape does not match the adapter");
  }
  return add(base_weight, delta_weight(state));
}

}  // namespace macp
