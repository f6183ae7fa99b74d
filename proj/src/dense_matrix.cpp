#include "macp/dense_matrix.hpp"

#include <cmath>
#include <string>

#include "macp/errors.hpp"

namespace macp {

namespace {

void require_positive(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols) {
  require_positive(rows, cols);
  values_.assign(rows * cols, 0.0);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  require_positive(rows, cols);
  if (values_.size() != rows * cols) {
    throw ShapeError("expected " + std::to_string(rows * cols) + " values, got " +
                     std::to_string(values_.size()));
  }
  if (!all_finite()) throw InvalidArgument("matrix contains non-finite values");
}

DenseMatrix DenseMatrix::constant(std::size_t rows, std::size_t cols, double value) {
  return DenseMatrix(rows, cols, std::vector<double>(rows * cols, value));
}

DenseMatrix DenseMatrix::from_eigen(const RowMajorMatrix& m) {
  DenseMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  out.map() = m;
  return out;
}

bool DenseMatrix::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  }
  return worst;
}

double inner_product(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "inner_product");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.values()[i] * b.values()[i];
  return acc;
}

double sum_of_squares(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.values()) acc += v * v;
  return acc;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] += b.values()[i];
  return out;
}

std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) {
    throw ShapeError("matvec: vector length " + std::to_string(x.size()) +
                     " does not match " + std::to_string(m.cols()) + " columns");
  }
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

const char* to_string(FormatErrc code) {
  switch (code) {
    case FormatErrc::kIo: return "io error";
    case FormatErrc::kBadMagic: return "bad magic";
    case FormatErrc::kVersionMismatch: return "version mismatch";
    case FormatErrc::kBadDtype: return "bad dtype";
    case FormatErrc::kTruncatedPayload: return "truncated payload";
    case FormatErrc::kDimensionOverflow: return "dimension overflow";
    case FormatErrc::kTrailingBytes: return "trailing bytes";
    case FormatErrc::kParse: return "parse error";
    case FormatErrc::kMissingKey: return "missing key";
    case FormatErrc::kLengthMismatch: return "length mismatch";
    case FormatErrc::kNonFinite: return "non-finite value";
    case FormatErrc::kBadValue: return "bad value";
  }
  return "unknown";
}

}  // namespace macp
