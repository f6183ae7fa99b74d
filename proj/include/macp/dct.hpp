#pragma once

#include <cstddef>
#include <memory>

#include "macp/dense_matrix.hpp"

namespace macp {

/// Order in which the separable 1D passes are applied.
enum class SeparableOrder { kRowsFirst, kColumnsFirst };

/// Orthonormal DCT-II basis of length n: entry (k, i) is
/// a(k) * cos(pi / n * (i + 1/2) * k), a(0) = sqrt(1/n), a(k>0) = sqrt(2/n).
/// Bases are cached per length; the cache is thread-safe.
std::shared_ptr<const RowMajorMatrix> dct_basis(std::size_t n);

/// Forward orthonormal 2D DCT-II. Throws ShapeError on an empty matrix.
DenseMatrix dct2(const DenseMatrix& spatial,
                 SeparableOrder order = SeparableOrder::kRowsFirst);

/// Inverse of dct2 (orthonormal DCT-III). Throws ShapeError on an empty matrix.
DenseMatrix idct2(const DenseMatrix& spectrum,
                  SeparableOrder order = SeparableOrder::kRowsFirst);

/// Elementwise squared magnitude.
DenseMatrix energy_map(const DenseMatrix& spectrum);

}  // namespace macp
