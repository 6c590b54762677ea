#include "nmfinit/init.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nmfinit/errors.hpp"

namespace nmfinit {

namespace {

void check_input(const DenseMatrix& z) {
  if (!all_finite(z)) {
    throw DomainError("init: input contains non-finite entries");
  }
  if (!all_nonnegative(z)) {
    throw DomainError("init: input matrix has negative entries");
  }
}

void check_rank(const SvdFactors& f, std::size_t p) {
  if (p < 1 || p > f.sigma.size()) {
    throw DomainError("init: rank " + std::to_string(p) + " outside [1, " +
                      std::to_string(f.sigma.size()) + "]");
  }
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::string_view to_string(InitMethod method) noexcept {
  switch (method) {
    case InitMethod::svdnmf:
      return "svdnmf";
    case InitMethod::nndsvd:
      return "nndsvd";
    case InitMethod::nndsvd_abs:
      return "nndsvd-abs";
    case InitMethod::random:
      return "random";
  }
  return "unknown";
}

std::optional<InitMethod> parse_init_method(std::string_view name) noexcept {
  for (InitMethod m : {InitMethod::svdnmf, InitMethod::nndsvd,
                       InitMethod::nndsvd_abs, InitMethod::random}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

NmfFactors svd_nmf_init(const DenseMatrix& z, std::size_t p) {
  check_input(z);
  return svd_nmf_init(svd(z), p);
}

NmfFactors svd_nmf_init(const SvdFactors& f, std::size_t p) {
  check_rank(f, p);
  TruncatedFactors t = truncate(f, p);
  return NmfFactors{abs(t.u_prime), abs(t.sigma_prime_vt), p};
}

NmfFactors nndsvd_init(const DenseMatrix& z, std::size_t p) {
  check_input(z);
  return nndsvd_init(svd(z), p);
}

NmfFactors nndsvd_init(const SvdFactors& f, std::size_t p) {
  check_rank(f, p);
  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  NmfFactors out{DenseMatrix(m, p), DenseMatrix(p, n), p};

  const double lead = std::sqrt(f.sigma[0]);
  for (std::size_t i = 0; i < m; ++i) out.w(i, 0) = lead * std::fabs(f.u(i, 0));
  for (std::size_t k = 0; k < n; ++k) out.h(0, k) = lead * std::fabs(f.v(k, 0));

  std::vector<double> xp(m), xn(m), yp(n), yn(n);
  for (std::size_t j = 1; j < p; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const double x = f.u(i, j);
      xp[i] = x > 0.0 ? x : 0.0;
      xn[i] = x < 0.0 ? -x : 0.0;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double y = f.v(k, j);
      yp[k] = y > 0.0 ? y : 0.0;
      yn[k] = y < 0.0 ? -y : 0.0;
    }
    const double xp_norm = norm2(xp), yp_norm = norm2(yp);
    const double xn_norm = norm2(xn), yn_norm = norm2(yn);
    const double mu_pos = xp_norm * yp_norm;
    const double mu_neg = xn_norm * yn_norm;

    const bool positive = mu_pos >= mu_neg;
    const double mu = positive ? mu_pos : mu_neg;
    if (mu == 0.0) continue;
    const auto& x = positive ? xp : xn;
    const auto& y = positive ? yp : yn;
    const double x_norm = positive ? xp_norm : xn_norm;
    const double y_norm = positive ? yp_norm : yn_norm;

    const double scale = std::sqrt(f.sigma[j] * mu);
    for (std::size_t i = 0; i < m; ++i) out.w(i, j) = scale * x[i] / x_norm;
    for (std::size_t k = 0; k < n; ++k) out.h(j, k) = scale * y[k] / y_norm;
  }
  return out;
}

NmfFactors nndsvd_abs_init(const DenseMatrix& z, std::size_t p) {
  check_input(z);
  return nndsvd_abs_init(svd(z), p);
}

NmfFactors nndsvd_abs_init(const SvdFactors& f, std::size_t p) {
  check_rank(f, p);
  const std::size_t m = f.rows();
  const std::size_t n = f.cols();
  NmfFactors out{DenseMatrix(m, p), DenseMatrix(p, n), p};
  for (std::size_t j = 0; j < p; ++j) {
    const double scale = std::sqrt(f.sigma[j]);
    for (std::size_t i = 0; i < m; ++i) out.w(i, j) = scale * std::fabs(f.u(i, j));
    for (std::size_t k = 0; k < n; ++k) out.h(j, k) = scale * std::fabs(f.v(k, j));
  }
  return out;
}

NmfFactors random_init(std::size_t m, std::size_t n, std::size_t p,
                       std::uint64_t seed) {
  NmfFactors out{DenseMatrix(m, p), DenseMatrix(p, n), p};
  std::mt19937_64 engine(seed);
  const auto draw = [&engine] {
    // (k + 0.5) / 2^53 for k in [0, 2^53): strictly inside (0, 1).
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
  };
  for (double& x : out.w.data()) x = draw();
  for (double& x : out.h.data()) x = draw();
  return out;
}

NmfFactors initialize(InitMethod method, const DenseMatrix& z, std::size_t p,
                      std::uint64_t seed, const SvdFactors* svd_cache) {
  if (method == InitMethod::random) {
    if (p < 1 || p > std::min(z.rows(), z.cols())) {
      throw DomainError("init: rank " + std::to_string(p) + " outside [1, " +
                        std::to_string(std::min(z.rows(), z.cols())) + "]");
    }
    return random_init(z.rows(), z.cols(), p, seed);
  }
  check_input(z);
  std::optional<SvdFactors> local;
  if (svd_cache == nullptr) {
    local = svd(z);
    svd_cache = &*local;
  }
  switch (method) {
    case InitMethod::svdnmf:
      return svd_nmf_init(*svd_cache, p);
    case InitMethod::nndsvd:
      return nndsvd_init(*svd_cache, p);
    case InitMethod::nndsvd_abs:
      return nndsvd_abs_init(*svd_cache, p);
    case InitMethod::random:
      break;
  }
  throw InternalError("init: unhandled method");
}

void perturb_zeros(NmfFactors& factors, double amount) {
  if (amount == 0.0) return;
  for (double& x : factors.w.data()) {
    if (x == 0.0) x = amount;
  }
  for (double& x : factors.h.data()) {
    if (x == 0.0) x = amount;
  }
}

}  // namespace nmfinit
