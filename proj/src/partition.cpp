#include "macp/partition.hpp"

#include <cmath>
#include <string>

#include "macp/errors.hpp"

namespace macp {

std::string_view scheme_name(PartitionScheme scheme) {
  switch (scheme) {
    case PartitionScheme::kThreeBand: return "three_band";
    case PartitionScheme::kLowOnly: return "low_only";
    case PartitionScheme::kLowHigh: return "low_high";
    case PartitionScheme::kFourBand: return "four_band";
  }
  return "unknown";
}

PartitionScheme parse_scheme(std::string_view name) {
  for (auto s : {PartitionScheme::kThreeBand, PartitionScheme::kLowOnly,
                 PartitionScheme::kLowHigh, PartitionScheme::kFourBand}) {
    if (scheme_name(s) == name) return s;
  }
  throw InvalidArgument("unknown partition scheme '" + std::string(name) + "'");
}

std::vector<Fraction> scheme_thresholds(PartitionScheme scheme) {
  if (scheme == PartitionScheme::kFourBand) return {{1, 4}, {2, 4}, {3, 4}};
  return {{1, 3}, {2, 3}};
}

std::size_t scheme_band_count(PartitionScheme scheme) {
  return scheme_thresholds(scheme).size() + 1;
}

std::vector<std::size_t> permitted_bands(PartitionScheme scheme) {
  switch (scheme) {
    case PartitionScheme::kLowOnly: return {0};
    case PartitionScheme::kLowHigh: return {0, 2};
    case PartitionScheme::kFourBand: return {0, 1, 2, 3};
    case PartitionScheme::kThreeBand: break;
  }
  return {0, 1, 2};
}

PartitionMask::PartitionMask(std::size_t rows, std::size_t cols, PartitionScheme scheme)
    : rows_(rows), cols_(cols), scheme_(scheme) {
  if (rows == 0 || cols == 0) throw ShapeError("build_partition: grid dimensions must be positive");
  const double half_r = static_cast<double>(rows) / 2.0;
  const double half_c = static_cast<double>(cols) / 2.0;
  d_max_ = std::sqrt(half_r * half_r + half_c * half_c);

  const auto thresholds = scheme_thresholds(scheme);
  band_count_ = thresholds.size() + 1;
  labels_.resize(rows * cols);

  // d <= (p/q) d_max  <=>  4 q^2 (u^2 + v^2) <= p^2 (rows^2 + cols^2)
  using Wide = unsigned __int128;
  const Wide extent = Wide(rows) * rows + Wide(cols) * cols;
  for (std::size_t u = 0; u < rows; ++u) {
    for (std::size_t v = 0; v < cols; ++v) {
      const Wide dist2 = Wide(u) * u + Wide(v) * v;
      std::size_t band = thresholds.size();
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        const auto [p, q] = thresholds[k];
        if (Wide(4) * Wide(q) * Wide(q) * dist2 <= Wide(p) * Wide(p) * extent) {
          band = k;
          break;
        }
      }
      labels_[u * cols + v] = static_cast<std::uint8_t>(band);
    }
  }
}

PartitionMask build_partition(std::size_t rows, std::size_t cols, PartitionScheme scheme) {
  return PartitionMask(rows, cols, scheme);
}

std::vector<std::size_t> band_sizes(const PartitionMask& mask) {
  std::vector<std::size_t> sizes(mask.band_count(), 0);
  for (auto label : mask.labels()) ++sizes[label];
  return sizes;
}

}  // namespace macp
