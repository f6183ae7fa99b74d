#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace macp {

enum class PartitionScheme { kThreeBand, kLowOnly, kLowHigh, kFourBand };

/// A band threshold t = num/den, as a fraction of d_max.
struct Fraction {
  std::int64_t num;
  std::int64_t den;
};

std::string_view scheme_name(PartitionScheme scheme);
/// Throws InvalidArgument for an unknown name.
PartitionScheme parse_scheme(std::string_view name);

/// Upper thresholds of every band but the top one, strictly increasing in (0,1).
std::vector<Fraction> scheme_thresholds(PartitionScheme scheme);
std::size_t scheme_band_count(PartitionScheme scheme);
/// Bands that may receive budget: all for three/four band, {0} for low_only,
/// {0, 2} for low_high.
std::vector<std::size_t> permitted_bands(PartitionScheme scheme);

/// Radial band labelling of a rows x cols frequency grid.
///
/// Cell (u, v) sits at distance sqrt(u^2 + v^2) from the DC origin and
/// d_max = sqrt((rows/2)^2 + (cols/2)^2). Band k holds the cells with
/// t_{k-1} d_max < d <= t_k d_max; the top band is open-ended and also takes
/// corner cells beyond d_max. Comparisons are done in exact integer
/// arithmetic on squared distances so boundary cells land deterministically.
class PartitionMask {
 public:
  PartitionMask(std::size_t rows, std::size_t cols, PartitionScheme scheme);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  PartitionScheme scheme() const noexcept { return scheme_; }
  double d_max() const noexcept { return d_max_; }
  std::size_t band_count() const noexcept { return band_count_; }

  std::size_t band(std::size_t u, std::size_t v) const { return labels_[u * cols_ + v]; }
  const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  PartitionScheme scheme_;
  double d_max_;
  std::size_t band_count_;
  std::vector<std::uint8_t> labels_;
};

/// Throws ShapeError on a zero dimension.
PartitionMask build_partition(std::size_t rows, std::size_t cols, PartitionScheme scheme);

/// Cell count per band; sums to rows * cols.
std::vector<std::size_t> band_sizes(const PartitionMask& mask);

}  // namespace macp
