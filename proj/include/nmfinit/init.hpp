#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "nmfinit/matrix.hpp"
#include "nmfinit/svd.hpp"

namespace nmfinit {

/// Starting (or final) factors W (m x p) and H (p x n), entrywise >= 0.
struct NmfFactors {
  DenseMatrix w;
  DenseMatrix h;
  std::size_t p = 0;
};

enum class InitMethod { svdnmf, nndsvd, nndsvd_abs, random };

std::string_view to_string(InitMethod method) noexcept;
std::optional<InitMethod> parse_init_method(std::string_view name) noexcept;

/// W0 = |U'|, H0 = |Sigma' V^T|: absolute values of the rank-p truncated SVD
/// factors. Computes one SVD of `z`.
NmfFactors svd_nmf_init(const DenseMatrix& z, std::size_t p);
NmfFactors svd_nmf_init(const SvdFactors& f, std::size_t p);

/// Nonnegative double SVD (Boutsidis & Gallopoulos), plain variant: zeros are
/// left as zeros. For j >= 2 the dominant positive or negative section of
/// (u_j, v_j) is kept; ties go to the positive section.
NmfFactors nndsvd_init(const DenseMatrix& z, std::size_t p);
NmfFactors nndsvd_init(const SvdFactors& f, std::size_t p);

/// NNDSVD scaling without section extraction:
/// w(:,j) = sqrt(sigma_j) |u_j|, h(j,:) = sqrt(sigma_j) |v_j|^T.
NmfFactors nndsvd_abs_init(const DenseMatrix& z, std::size_t p);
NmfFactors nndsvd_abs_init(const SvdFactors& f, std::size_t p);

/// Entries uniform on the open interval (0, 1), drawn from std::mt19937_64
/// seeded with `seed`: W row-major first, then H row-major. Each draw keeps
/// the top 53 bits and centers them in their bucket, so the mapping is exact
/// and identical on every platform.
NmfFactors random_init(std::size_t m, std::size_t n, std::size_t p,
                       std::uint64_t seed);

/// Dispatch on `method`. `svd_cache`, when given, must be the SVD of `z` and
/// is reused instead of recomputing it.
NmfFactors initialize(InitMethod method, const DenseMatrix& z, std::size_t p,
                      std::uint64_t seed,
                      const SvdFactors* svd_cache = nullptr);

/// Adds `amount` to every entry that is exactly zero, so multiplicative
/// updates can move it. A no-op for amount == 0.
void perturb_zeros(NmfFactors& factors, double amount);

}  // namespace nmfinit
