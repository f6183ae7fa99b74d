#include "macp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "macp/errors.hpp"
#include "macp/partition.hpp"
#include "macp/rng.hpp"

namespace macp {

LowRankState lowrank_init(std::size_t d_1, std::size_t d_2, std::size_t r, std::uint64_t seed) {
  if (r < 1 || r > std::min(d_1, d_2)) {
    throw InvalidArgument("lowrank_init: rank " + std::to_string(r) + " outside [1, " +
                          std::to_string(std::min(d_1, d_2)) + "]");
  }
  LowRankState state{DenseMatrix(r, d_1), DenseMatrix(d_2, r), r, 1.0};
  const double bound = kaiming_bound(d_1);
  Rng rng(seed, RngStream::kLowRankInit);
  for (double& v : state.a.values()) v = rng.uniform(-bound, bound);
  return state;
}

DenseMatrix lowrank_delta(const LowRankState& state) {
  DenseMatrix out(state.b.rows(), state.a.cols());
  out.map().noalias() = state.scale * (state.b.map() * state.a.map());
  return out;
}

LowRankGrads lowrank_grads(const LowRankState& state, const DenseMatrix& grad_delta_w) {
  if (grad_delta_w.rows() != state.b.rows() || grad_delta_w.cols() != state.a.cols()) {
    throw ShapeError("lowrank_grads: gradient shape does not match the adapter");
  }
  LowRankGrads grads{DenseMatrix(state.a.rows(), state.a.cols()),
                     DenseMatrix(state.b.rows(), state.b.cols())};
  grads.grad_a.map().noalias() = state.scale * (state.b.map().transpose() * grad_delta_w.map());
  grads.grad_b.map().noalias() = state.scale * (grad_delta_w.map() * state.a.map().transpose());
  return grads;
}

RandomSpectralState random_spectral_init(std::size_t d_1, std::size_t d_2, std::size_t n,
                                         double alpha, std::uint64_t seed, CoeffInit init) {
  const std::size_t cells = d_1 * d_2;
  if (d_1 == 0 || d_2 == 0) throw ShapeError("random_spectral_init: empty grid");
  if (n > cells) {
    throw CapacityError("random_spectral_init: n=" + std::to_string(n) + " exceeds " +
                        std::to_string(cells) + " grid cells");
  }
  if (!std::isfinite(alpha) || alpha == 0.0) {
    throw InvalidArgument("random_spectral_init: alpha must be finite and nonzero");
  }

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, RngStream::kRandomSpectral);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(cells - i));
    std::swap(order[i], order[j]);
  }

  const auto mask = build_partition(d_2, d_1, PartitionScheme::kThreeBand);
  struct Pick {
    std::size_t band;
    Coord coord;
  };
  std::vector<Pick> picks;
  for (std::size_t i = 0; i < n; ++i) {
    const Coord c{static_cast<std::uint32_t>(order[i] / d_1),
                  static_cast<std::uint32_t>(order[i] % d_1)};
    picks.push_back({mask.band(c.u, c.v), c});
  }
  std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
    return std::tie(a.band, a.coord) < std::tie(b.band, b.coord);
  });

  RandomSpectralState state;
  state.rows = d_2;
  state.cols = d_1;
  state.alpha = alpha;
  state.plan.rows = d_2;
  state.plan.cols = d_1;
  state.plan.delta = 0.0;
  state.plan.seed = seed;
  state.plan.scheme = PartitionScheme::kThreeBand;
  for (const auto& p : picks) {
    state.plan.coords.push_back(p.coord);
    state.plan.band.push_back(p.band);
    state.plan.provenance.push_back(Provenance::kRandom);
  }
  state.coeffs.assign(n, 0.0);
  if (init == CoeffInit::kKaimingUniform) {
    const double bound = kaiming_bound(d_1);
    Rng coeff_rng(seed, RngStream::kCoefficientInit);
    for (double& c : state.coeffs) c = coeff_rng.uniform(-bound, bound);
  }
  return state;
}

}  // namespace macp
