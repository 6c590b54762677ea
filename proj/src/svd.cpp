#include "nmfinit/svd.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <span>
#include <string>

#include "nmfinit/errors.hpp"

namespace nmfinit {

namespace {

/// `count` vectors of length `length`, stored contiguously one after another.
class VectorSet {
 public:
  VectorSet(std::size_t count, std::size_t length)
      : count_(count), length_(length), data_(count * length, 0.0) {}

  std::size_t count() const noexcept { return count_; }
  std::size_t length() const noexcept { return length_; }

  std::span<double> operator[](std::size_t k) noexcept {
    return {data_.data() + k * length_, length_};
  }
  std::span<const double> operator[](std::size_t k) const noexcept {
    return {data_.data() + k * length_, length_};
  }

 private:
  std::size_t count_;
  std::size_t length_;
  std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

struct ThinSvd {
  VectorSet left;  // columns a_j after orthogonalization (unnormalized)
  VectorSet right;  // accumulated rotations, the columns of V
  std::vector<double> norms;
};

/// Hestenes iteration on the columns of a matrix with rows >= cols.
ThinSvd orthogonalize_columns(const DenseMatrix& a, const SvdOptions& options) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  ThinSvd out{VectorSet(n, m), VectorSet(n, n), {}};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.left[j][i] = a(i, j);
  }
  for (std::size_t j = 0; j < n; ++j) out.right[j][j] = 1.0;

  // Columns this small relative to the whole matrix are numerical noise;
  // rotating against them cannot change the decomposition beyond roundoff.
  const double negligible =
      frobenius_norm(a) * static_cast<double>(std::max(m, n)) * DBL_EPSILON;
  const double negligible_sq = negligible * negligible;

  double residual = 0.0;
  bool converged = (n < 2);
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    residual = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto ai = out.left[i];
        auto aj = out.left[j];
        const double alpha = dot(ai, ai);
        const double beta = dot(aj, aj);
        if (alpha <= negligible_sq || beta <= negligible_sq) continue;
        const double gamma = dot(ai, aj);
        const double off = std::fabs(gamma) / std::sqrt(alpha * beta);
        residual = std::max(residual, off);
        if (off <= options.tolerance) continue;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        rotate(ai, aj, c, s);
        rotate(out.right[i], out.right[j], c, s);
      }
    }
    converged = residual <= options.tolerance;
  }
  if (!converged) {
    throw ConvergenceError(
        "svd: one-sided Jacobi did not converge in " +
            std::to_string(options.max_sweeps) +
            " sweeps (off-diagonal residual " + std::to_string(residual) + ")",
        residual);
  }

  out.norms.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.norms[j] = std::sqrt(dot(out.left[j], out.left[j]));
  }
  return out;
}

/// Fills every slot of `basis` not flagged in `present` with a unit vector
/// orthogonal to everything already present. Candidates are the standard
/// basis vectors in index order, projected out twice (classical Gram-Schmidt
/// with reorthogonalization).
void complete_basis(VectorSet& basis, std::vector<bool>& present) {
  const std::size_t dim = basis.length();
  // Some remaining candidate always keeps squared residual >= 1/dim.
  const double accept = 1.0 / (2.0 * std::sqrt(static_cast<double>(dim)));
  std::vector<double> candidate(dim);
  std::size_t next_candidate = 0;

  for (std::size_t slot = 0; slot < basis.count(); ++slot) {
    if (present[slot]) continue;
    bool placed = false;
    while (!placed) {
      if (next_candidate == dim) {
        throw InternalError("svd: orthonormal completion ran out of candidates");
      }
      std::fill(candidate.begin(), candidate.end(), 0.0);
      candidate[next_candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t k = 0; k < basis.count(); ++k) {
          if (!present[k]) continue;
          auto q = basis[k];
          const double coeff = dot(q, candidate);
          for (std::size_t i = 0; i < dim; ++i) candidate[i] -= coeff * q[i];
        }
      }
      const double norm = std::sqrt(dot(candidate, candidate));
      if (norm < accept) continue;
      auto dst = basis[slot];
      for (std::size_t i = 0; i < dim; ++i) dst[i] = candidate[i] / norm;
      present[slot] = true;
      placed = true;
    }
  }
}

DenseMatrix columns_to_matrix(const VectorSet& cols) {
  DenseMatrix out(cols.length(), cols.count());
  for (std::size_t j = 0; j < cols.count(); ++j) {
    for (std::size_t i = 0; i < cols.length(); ++i) out(i, j) = cols[j][i];
  }
  return out;
}

/// Full SVD of a matrix with rows >= cols.
SvdFactors svd_tall(const DenseMatrix& a, const SvdOptions& options) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  ThinSvd thin = orthogonalize_columns(a, options);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return thin.norms[x] > thin.norms[y];
  });

  const double sigma_max = n == 0 ? 0.0 : thin.norms[order.front()];
  const double null_cutoff = std::max(
      frobenius_norm(a) * static_cast<double>(std::max(m, n)) * DBL_EPSILON,
      DBL_MIN);

  SvdFactors f{DenseMatrix(m, m), std::vector<double>(n), DenseMatrix(n, n)};
  VectorSet left(m, m);
  std::vector<bool> present(m, false);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    const double sigma = thin.norms[src];
    f.sigma[k] = sigma;
    for (std::size_t i = 0; i < n; ++i) f.v(i, k) = thin.right[src][i];
    if (sigma > null_cutoff && sigma_max > 0.0) {
      auto dst = left[k];
      for (std::size_t i = 0; i < m; ++i) dst[i] = thin.left[src][i] / sigma;
      present[k] = true;
    }
  }
  complete_basis(left, present);
  f.u = columns_to_matrix(left);
  return f;
}

}  // namespace

SvdFactors svd(const DenseMatrix& z, const SvdOptions& options) {
  if (z.rows() == 0 || z.cols() == 0) {
    throw ShapeError("svd: empty matrix");
  }
  if (!all_finite(z)) {
    throw DomainError("svd: input contains non-finite entries");
  }
  if (z.rows() >= z.cols()) return svd_tall(z, options);

  // Z^T = U' S V'^T  =>  Z = V' S U'^T.
  SvdFactors t = svd_tall(transpose(z), options);
  return SvdFactors{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

TruncatedFactors truncate(const SvdFactors& f, std::size_t p) {
  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  if (p < 1 || p > f.sigma.size()) {
    throw DomainError("truncate: rank " + std::to_string(p) +
                      " outside [1, " + std::to_string(f.sigma.size()) + "]");
  }
  TruncatedFactors out{DenseMatrix(m, p), DenseMatrix(p, n)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) out.u_prime(i, j) = f.u(i, j);
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      out.sigma_prime_vt(j, k) = f.sigma[j] * f.v(k, j);
    }
  }
  return out;
}

DenseMatrix reconstruct(const SvdFactors& f) {
  const TruncatedFactors t = truncate(f, f.sigma.size());
  return matmul(t.u_prime, t.sigma_prime_vt);
}

}  // namespace nmfinit
