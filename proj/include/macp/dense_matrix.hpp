#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace macp {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMajorMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMajorMatrix>;

/// Row-major matrix of doubles. Holds both spatial weights and spectra.
///
/// A default-constructed matrix is empty (0x0). Every other instance has
/// positive dimensions and was finite-valued at construction.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  /// Zero-filled rows x cols matrix. Throws ShapeError on a zero dimension.
  DenseMatrix(std::size_t rows, std::size_t cols);
  /// Throws ShapeError on a size mismatch, InvalidArgument on NaN/Inf.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix constant(std::size_t rows, std::size_t cols, double value);
  static DenseMatrix from_eigen(const RowMajorMatrix& m);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  MatrixMap map() { return MatrixMap(values_.data(), rows_, cols_); }
  ConstMatrixMap map() const { return ConstMatrixMap(values_.data(), rows_, cols_); }

  bool same_shape(const DenseMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Largest absolute elementwise difference. Shapes must match.
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

/// Sum of elementwise products. Shapes must match.
double inner_product(const DenseMatrix& a, const DenseMatrix& b);

double sum_of_squares(const DenseMatrix& m);

/// a + b. Throws ShapeError if shapes differ.
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);

/// m * x for a column vector x of length m.cols().
std::vector<double> matvec(const DenseMatrix& m, std::span<const double> x);

}  // namespace macp
