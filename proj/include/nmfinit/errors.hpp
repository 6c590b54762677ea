#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nmfinit {

/// Operand shapes are incompatible for the requested operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the domain of an operation (sqrt of a negative,
/// non-finite entries, out-of-range rank, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input carries no information for the requested quantity (all-zero
/// spectrum, all-zero matrix under a relative metric).
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An invariant that should hold by construction was violated.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Jacobi sweeps exhausted before all column pairs became orthogonal.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  /// Largest normalized off-diagonal inner product left after the last sweep.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Malformed input file. `offset()` is a byte offset for binary formats and a
/// 1-based line number for text tables.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace nmfinit
