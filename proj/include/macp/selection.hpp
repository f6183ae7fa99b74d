#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "macp/dense_matrix.hpp"
#include "macp/partition.hpp"

namespace macp {

struct Coord {
  std::uint32_t u = 0;
  std::uint32_t v = 0;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

enum class Provenance : std::uint8_t { kEnergy, kRandom };

/// Selected frequency cells, canonically ordered by (band, u, v).
struct SelectionPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Coord> coords;
  std::vector<Provenance> provenance;
  std::vector<std::size_t> band;
  double delta = 0.0;
  std::uint64_t seed = 0;
  PartitionScheme scheme = PartitionScheme::kThreeBand;

  std::size_t size() const noexcept { return coords.size(); }
  friend bool operator==(const SelectionPlan&, const SelectionPlan&) = default;
};

/// Splits n across the scheme's permitted bands in proportion to band size,
/// rounding by largest remainder (ties to the lower band). Throws
/// CapacityError when n exceeds the permitted cells.
std::vector<std::size_t> allocate_budgets(std::size_t n, const PartitionMask& mask);

/// Number of energy-ranked picks for a band budget: floor(budget * delta).
std::size_t energy_pick_count(std::size_t budget, double delta);

/// Hybrid stratified selection. Per band: the top floor(b_k * delta) cells by
/// energy (ties broken by ascending (u, v)), then the rest drawn uniformly
/// without replacement by partial Fisher-Yates over the band's remaining cells
/// in lexicographic order.
SelectionPlan select_coefficients(const DenseMatrix& base_energy, const PartitionMask& mask,
                                  std::size_t n, double delta, std::uint64_t seed);

/// dct2 -> energy_map -> select_coefficients.
SelectionPlan plan_from_weights(const DenseMatrix& base_weight, PartitionScheme scheme,
                                std::size_t n, double delta, std::uint64_t seed);

}  // namespace macp
