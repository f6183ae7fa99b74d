#include "macp/dct.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "macp/errors.hpp"

namespace macp {

namespace {

RowMajorMatrix make_basis(std::size_t n) {
  RowMajorMatrix basis(n, n);
  const double dc = std::sqrt(1.0 / static_cast<double>(n));
  const double ac = std::sqrt(2.0 / static_cast<double>(n));
  // cos(pi (2i+1) k / 2n); reduce the integer phase mod 4n first so large
  // lengths keep full accuracy.
  const std::size_t period = 4 * n;
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = (k == 0) ? dc : ac;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t phase = ((2 * i + 1) * k) % period;
      const double angle = std::numbers::pi * static_cast<double>(phase) /
                           static_cast<double>(2 * n);
      basis(k, i) = scale * std::cos(angle);
    }
  }
  return basis;
}

void require_non_empty(const DenseMatrix& m, const char* op) {
  if (m.empty()) throw ShapeError(std::string(op) + ": empty matrix");
}

}  // namespace

std::shared_ptr<const RowMajorMatrix> dct_basis(std::size_t n) {
  if (n == 0) throw ShapeError("dct_basis: length must be positive");
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const RowMajorMatrix>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto basis = std::make_shared<const RowMajorMatrix>(make_basis(n));
  std::lock_guard lock(mu);
  return cache.emplace(n, std::move(basis)).first->second;
}

// With C_L the basis for length L: dct2(X) = C_M X C_N^T, idct2(Y) = C_M^T Y C_N.
// kRowsFirst transforms each row (the length-N pass) before each column.

DenseMatrix dct2(const DenseMatrix& spatial, SeparableOrder order) {
  require_non_empty(spatial, "dct2");
  const auto cm = dct_basis(spatial.rows());
  const auto cn = dct_basis(spatial.cols());
  const auto x = spatial.map();
  DenseMatrix out(spatial.rows(), spatial.cols());
  if (order == SeparableOrder::kRowsFirst) {
    const RowMajorMatrix rows_done = x * cn->transpose();
    out.map().noalias() = (*cm) * rows_done;
  } else {
    const RowMajorMatrix cols_done = (*cm) * x;
    out.map().noalias() = cols_done * cn->transpose();
  }
  return out;
}

DenseMatrix idct2(const DenseMatrix& spectrum, SeparableOrder order) {
  require_non_empty(spectrum, "idct2");
  const auto cm = dct_basis(spectrum.rows());
  const auto cn = dct_basis(spectrum.cols());
  const auto y = spectrum.map();
  DenseMatrix out(spectrum.rows(), spectrum.cols());
  if (order == SeparableOrder::kRowsFirst) {
    const RowMajorMatrix rows_done = y * (*cn);
    out.map().noalias() = cm->transpose() * rows_done;
  } else {
    const RowMajorMatrix cols_done = cm->transpose() * y;
    out.map().noalias() = cols_done * (*cn);
  }
  return out;
}

DenseMatrix energy_map(const DenseMatrix& spectrum) {
  DenseMatrix out = spectrum;
  for (double& v : out.values()) v *= v;
  return out;
}

}  // namespace macp
