#include "macp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "macp/dct.hpp"
#include "macp/errors.hpp"
#include "macp/rng.hpp"

namespace macp {

std::vector<std::size_t> allocate_budgets(std::size_t n, const PartitionMask& mask) {
  const auto sizes = band_sizes(mask);
  const auto permitted = permitted_bands(mask.scheme());
  std::size_t capacity = 0;
  for (auto k : permitted) capacity += sizes[k];
  if (n > capacity) {
    throw CapacityError("budget n=" + std::to_string(n) + " exceeds the " +
                        std::to_string(capacity) + " cells permitted by scheme " +
                        std::string(scheme_name(mask.scheme())));
  }

  std::vector<std::size_t> budgets(sizes.size(), 0);
  if (n == 0) return budgets;

  // Quota n * size_k / capacity = floor + remainder / capacity, in integers.
  struct Share {
    std::size_t band;
    std::size_t remainder;
  };
  std::vector<Share> shares;
  std::size_t assigned = 0;
  for (auto k : permitted) {
    const auto scaled = static_cast<unsigned __int128>(n) * sizes[k];
    budgets[k] = static_cast<std::size_t>(scaled / capacity);
    shares.push_back({k, static_cast<std::size_t>(scaled % capacity)});
    assigned += budgets[k];
  }
  std::stable_sort(shares.begin(), shares.end(),
                   [](const Share& a, const Share& b) { return a.remainder > b.remainder; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++budgets[shares[i].band];

  // Proportional shares never exceed a band's size, but keep the clamp so
  // budgets stay valid if the rule above changes.
  std::size_t overflow = 0;
  for (std::size_t idx = 0; idx < permitted.size(); ++idx) {
    const auto k = permitted[idx];
    budgets[k] += overflow;
    overflow = 0;
    if (budgets[k] > sizes[k]) {
      overflow = budgets[k] - sizes[k];
      budgets[k] = sizes[k];
    }
  }
  for (std::size_t idx = 0; overflow > 0 && idx < permitted.size(); ++idx) {
    const auto k = permitted[idx];
    const std::size_t room = sizes[k] - budgets[k];
    const std::size_t take = std::min(room, overflow);
    budgets[k] += take;
    overflow -= take;
  }
  return budgets;
}

std::size_t energy_pick_count(std::size_t budget, double delta) {
  // The epsilon absorbs representation error in delta (0.7 * 10 must give 7).
  const double raw = static_cast<double>(budget) * delta;
  const auto picks = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return std::min(picks, budget);
}

SelectionPlan select_coefficients(const DenseMatrix& base_energy, const PartitionMask& mask,
                                  std::size_t n, double delta, std::uint64_t seed) {
  if (base_energy.rows() != mask.rows() || base_energy.cols() != mask.cols()) {
    throw ShapeError("select_coefficients: energy map shape does not match the partition grid");
  }
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidArgument("select_coefficients: delta must lie in [0, 1]");
  }
  const auto budgets = allocate_budgets(n, mask);

  // Cells of each band in lexicographic (u, v) order.
  std::vector<std::vector<Coord>> cells(mask.band_count());
  for (std::uint32_t u = 0; u < mask.rows(); ++u) {
    for (std::uint32_t v = 0; v < mask.cols(); ++v) cells[mask.band(u, v)].push_back({u, v});
  }

  struct Pick {
    std::size_t band;
    Coord coord;
    Provenance provenance;
  };
  std::vector<Pick> picks;
  picks.reserve(n);

  Rng rng(seed, RngStream::kSelection);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t budget = budgets[k];
    if (budget == 0) continue;
    auto& pool = cells[k];
    const std::size_t n_energy = energy_pick_count(budget, delta);

    // Move the n_energy strongest cells to the front; ties keep (u, v) order.
    std::stable_sort(pool.begin(), pool.end(), [&](const Coord& a, const Coord& b) {
      return base_energy(a.u, a.v) > base_energy(b.u, b.v);
    });
    for (std::size_t i = 0; i < n_energy; ++i) picks.push_back({k, pool[i], Provenance::kEnergy});

    std::vector<Coord> rest(pool.begin() + static_cast<std::ptrdiff_t>(n_energy), pool.end());
    std::sort(rest.begin(), rest.end());
    const std::size_t n_random = budget - n_energy;
    for (std::size_t i = 0; i < n_random; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(rest.size() - i));
      std::swap(rest[i], rest[j]);
      picks.push_back({k, rest[i], Provenance::kRandom});
    }
  }

  std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
    return std::tie(a.band, a.coord) < std::tie(b.band, b.coord);
  });

  SelectionPlan plan;
  plan.rows = mask.rows();
  plan.cols = mask.cols();
  plan.delta = delta;
  plan.seed = seed;
  plan.scheme = mask.scheme();
  for (const auto& p : picks) {
    plan.coords.push_back(p.coord);
    plan.provenance.push_back(p.provenance);
    plan.band.push_back(p.band);
  }
  return plan;
}

SelectionPlan plan_from_weights(const DenseMatrix& base_weight, PartitionScheme scheme,
                                std::size_t n, double delta, std::uint64_t seed) {
  const auto mask = build_partition(base_weight.rows(), base_weight.cols(), scheme);
  return select_coefficients(energy_map(dct2(base_weight)), mask, n, delta, seed);
}

}  // namespace macp
