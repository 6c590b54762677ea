#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nmfinit {

/// Dense real matrix, row-major, 64-bit floating point.
///
/// Value type: copies are deep, and every free function below returns a new
/// matrix rather than mutating its arguments. A default-constructed matrix is
/// 0x0 and only useful as a placeholder.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  /// rows x cols matrix filled with `fill`. Both dimensions must be positive.
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  /// Takes ownership of row-major `data`; `data.size()` must equal rows*cols.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  /// Nested-list literal, e.g. `{{1, 2}, {3, 4}}`. Rows must be equal length.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  /// "RxC", used in error messages.
  std::string shape_string() const;

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ElementwiseMode { mul, div, sqrt, abs };

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// Entrywise kernel. `mul`/`div` are binary and need `b` of the same shape;
/// `sqrt`/`abs` are unary and ignore `b` (pass nullptr).
/// Throws ShapeError on mismatch and DomainError on sqrt of a negative entry
/// or a non-finite quotient.
DenseMatrix elementwise(const DenseMatrix& a, const DenseMatrix* b,
                        ElementwiseMode mode);

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix divide(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sqrt(const DenseMatrix& a);
DenseMatrix abs(const DenseMatrix& a);

DenseMatrix transpose(const DenseMatrix& a);

double frobenius_norm(const DenseMatrix& a);

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

/// a + s for every entry.
DenseMatrix add_scalar(const DenseMatrix& a, double s);

bool all_finite(const DenseMatrix& a) noexcept;
bool all_nonnegative(const DenseMatrix& a) noexcept;

}  // namespace nmfinit
