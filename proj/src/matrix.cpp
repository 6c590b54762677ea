#include "nmfinit/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "nmfinit/errors.hpp"

namespace nmfinit {

namespace {

void require_positive_shape(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("matrix dimensions must be positive, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b,
                        const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() +
                     " vs " + b.shape_string());
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
  require_positive_shape(rows, cols);
  data_.assign(rows * cols, fill);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require_positive_shape(rows, cols);
  if (data_.size() != rows * cols) {
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match " + shape_string());
  }
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  require_positive_shape(rows_, cols_);
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw ShapeError("ragged initializer list");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> values) {
  DenseMatrix out(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i, i) = values[i];
  return out;
}

std::string DenseMatrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: shape mismatch " + a.shape_string() + " * " +
                     b.shape_string());
  }
  const std::size_t m = a.rows();
  const std::size_t k = a.cols();
  const std::size_t n = b.cols();
  DenseMatrix out(m, n);
  // i-k-j order: inner loop streams a row of b into a row of out. The
  // reduction order is fixed, so results are reproducible bit-for-bit.
  for (std::size_t i = 0; i < m; ++i) {
    auto out_row = out.row(i);
    for (std::size_t l = 0; l < k; ++l) {
      const double a_il = a(i, l);
      if (a_il == 0.0) continue;
      auto b_row = b.row(l);
      for (std::size_t j = 0; j < n; ++j) out_row[j] += a_il * b_row[j];
    }
  }
  return out;
}

DenseMatrix elementwise(const DenseMatrix& a, const DenseMatrix* b,
                        ElementwiseMode mode) {
  DenseMatrix out = a;
  auto dst = out.data();
  switch (mode) {
    case ElementwiseMode::mul:
    case ElementwiseMode::div: {
      if (b == nullptr) {
        throw ShapeError("elementwise: binary mode needs a second operand");
      }
      require_same_shape(a, *b, mode == ElementwiseMode::mul ? "mul" : "div");
      auto rhs = b->data();
      if (mode == ElementwiseMode::mul) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] *= rhs[i];
      } else {
        for (std::size_t i = 0; i < dst.size(); ++i) {
          dst[i] /= rhs[i];
          if (!std::isfinite(dst[i])) {
            throw DomainError("div: non-finite quotient at flat index " +
                              std::to_string(i));
          }
        }
      }
      break;
    }
    case ElementwiseMode::sqrt:
      for (std::size_t i = 0; i < dst.size(); ++i) {
        if (dst[i] < 0.0) {
          throw DomainError("sqrt: negative entry " + std::to_string(dst[i]) +
                            " at flat index " + std::to_string(i));
        }
        dst[i] = std::sqrt(dst[i]);
      }
      break;
    case ElementwiseMode::abs:
      for (double& x : dst) x = std::fabs(x);
      break;
  }
  return out;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  return elementwise(a, &b, ElementwiseMode::mul);
}

DenseMatrix divide(const DenseMatrix& a, const DenseMatrix& b) {
  return elementwise(a, &b, ElementwiseMode::div);
}

DenseMatrix sqrt(const DenseMatrix& a) {
  return elementwise(a, nullptr, ElementwiseMode::sqrt);
}

DenseMatrix abs(const DenseMatrix& a) {
  return elementwise(a, nullptr, ElementwiseMode::abs);
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

double frobenius_norm(const DenseMatrix& a) {
  // Scaled accumulation avoids overflow/underflow for extreme entries.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : a.data()) {
    if (x == 0.0) continue;
    const double ax = std::fabs(x);
    if (scale < ax) {
      ssq = 1.0 + ssq * (scale / ax) * (scale / ax);
      scale = ax;
    } else {
      ssq += (ax / scale) * (ax / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "subtract");
  DenseMatrix out = a;
  auto dst = out.data();
  auto rhs = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= rhs[i];
  return out;
}

DenseMatrix add_scalar(const DenseMatrix& a, double s) {
  DenseMatrix out = a;
  for (double& x : out.data()) x += s;
  return out;
}

bool all_finite(const DenseMatrix& a) noexcept {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](double x) { return std::isfinite(x); });
}

bool all_nonnegative(const DenseMatrix& a) noexcept {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](double x) { return x >= 0.0; });
}

}  // namespace nmfinit
