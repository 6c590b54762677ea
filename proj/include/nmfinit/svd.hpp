#pragma once

#include <cstddef>
#include <vector>

#include "nmfinit/matrix.hpp"

namespace nmfinit {

/// Full singular value decomposition Z = U diag(sigma) V^T.
///
/// U is m x m and V is n x n, both orthogonal, singular vectors stored by
/// column. `sigma` has min(m, n) entries sorted descending. Columns past
/// min(m, n), and columns paired with numerically zero singular values, come
/// from a deterministic orthonormal completion. Column signs carry no meaning.
struct SvdFactors {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;

  std::size_t rows() const noexcept { return u.rows(); }
  std::size_t cols() const noexcept { return v.rows(); }
};

/// Rank-p truncation of an SVD: `u_prime` holds the first p columns of U and
/// row j of `sigma_prime_vt` is sigma_j * v_j^T, so their product is the best
/// rank-p approximation of the decomposed matrix.
struct TruncatedFactors {
  DenseMatrix u_prime;
  DenseMatrix sigma_prime_vt;
};

struct SvdOptions {
  /// Pair (i, j) is orthogonal once |a_i . a_j| <= tol * |a_i| |a_j|.
  double tolerance = 1e-12;
  int max_sweeps = 60;
};

/// One-sided (Hestenes) Jacobi SVD with cyclic row-by-row sweeps.
/// Throws DomainError on non-finite input and ConvergenceError when the sweep
/// budget is exhausted.
SvdFactors svd(const DenseMatrix& z, const SvdOptions& options = {});

/// Throws DomainError unless 1 <= p <= min(m, n).
TruncatedFactors truncate(const SvdFactors& f, std::size_t p);

/// U diag(sigma) V^T, for checks and diagnostics.
DenseMatrix reconstruct(const SvdFactors& f);

}  // namespace nmfinit
