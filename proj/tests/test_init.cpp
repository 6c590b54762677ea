#include <doctest.h>

#include <cmath>
#include <random>

#include "nmfinit/errors.hpp"
#include "nmfinit/init.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace nmfinit;
using nmfinit::testing::max_abs_diff;
using nmfinit::testing::random_matrix;
using nmfinit::testing::relative_diff;

namespace {

void check_factors(const NmfFactors& f, std::size_t m, std::size_t n,
                   std::size_t p) {
  CHECK(f.p == p);
  CHECK(f.w.rows() == m);
  CHECK(f.w.cols() == p);
  CHECK(f.h.rows() == p);
  CHECK(f.h.cols() == n);
  CHECK(all_nonnegative(f.w));
  CHECK(all_nonnegative(f.h));
  CHECK(all_finite(f.w));
  CHECK(all_finite(f.h));
}

void flip_pair(SvdFactors& f, std::size_t j) {
  for (std::size_t i = 0; i < f.u.rows(); ++i) f.u(i, j) = -f.u(i, j);
  for (std::size_t i = 0; i < f.v.rows(); ++i) f.v(i, j) = -f.v(i, j);
}

}  // namespace

TEST_CASE("svd_nmf_init on a diagonal matrix is exact") {
  const DenseMatrix z{{4, 0}, {0, 3}};
  const NmfFactors f = svd_nmf_init(z, 2);
  CHECK(f.w == DenseMatrix::identity(2));
  CHECK(f.h == z);
  CHECK(matmul(f.w, f.h) == z);

  const std::vector<double> d{5, 2, 0.5};
  const DenseMatrix diag = DenseMatrix::diagonal(d);
  const NmfFactors g = svd_nmf_init(diag, 3);
  CHECK(max_abs_diff(matmul(g.w, g.h), diag) <= 1e-15);
}

TEST_CASE("svd_nmf_init rank one on a positive matrix is the best rank-1 term") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix z = random_matrix(9, 6, rng, 0.1, 1.0);
    const NmfFactors f = svd_nmf_init(z, 1);
    CHECK(relative_diff(matmul(f.w, f.h), oracle::power_iteration_rank1(z)) <=
          1e-8);
  }
}

TEST_CASE("initializers ignore coordinated sign flips") {
  std::mt19937_64 rng(6);
  const DenseMatrix z = random_matrix(7, 5, rng);
  SvdFactors f = svd(z);
  const NmfFactors a1 = svd_nmf_init(f, 4);
  const NmfFactors b1 = nndsvd_init(f, 4);
  const NmfFactors c1 = nndsvd_abs_init(f, 4);
  flip_pair(f, 1);
  flip_pair(f, 3);
  CHECK(svd_nmf_init(f, 4).w == a1.w);
  CHECK(svd_nmf_init(f, 4).h == a1.h);
  CHECK(nndsvd_abs_init(f, 4).w == c1.w);
  CHECK(nndsvd_abs_init(f, 4).h == c1.h);
  // NNDSVD swaps sections under a flip; magnitudes agree unless mu+ == mu-.
  CHECK(max_abs_diff(nndsvd_init(f, 4).w, b1.w) <= 1e-15);
  CHECK(max_abs_diff(nndsvd_init(f, 4).h, b1.h) <= 1e-15);
}

TEST_CASE("nndsvd on a diagonal matrix") {
  const DenseMatrix z{{4, 0}, {0, 3}};
  const NmfFactors f = nndsvd_init(z, 2);
  const double r3 = std::sqrt(3.0);
  CHECK(max_abs_diff(f.w, DenseMatrix{{2, 0}, {0, r3}}) <= 1e-15);
  CHECK(max_abs_diff(f.h, DenseMatrix{{2, 0}, {0, r3}}) <= 1e-15);
  const NmfFactors g = nndsvd_abs_init(z, 2);
  CHECK(max_abs_diff(g.w, f.w) <= 1e-15);
  CHECK(max_abs_diff(g.h, f.h) <= 1e-15);
}

TEST_CASE("nndsvd leading column is the abs of the leading triplet") {
  std::mt19937_64 rng(9);
  const DenseMatrix z = random_matrix(8, 6, rng);
  const SvdFactors s = svd(z);
  const NmfFactors f = nndsvd_init(s, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t k = 0; k < 6; ++k) {
      const double expected =
          s.sigma[0] * std::fabs(s.u(i, 0)) * std::fabs(s.v(k, 0));
      CHECK(f.w(i, 0) * f.h(0, k) == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("nndsvd section rule on hand-built triplets") {
  // Build factors by hand so that every branch is exercised.
  SvdFactors f{DenseMatrix::identity(2), {2.0, 1.0}, DenseMatrix::identity(2)};
  const double h = 1.0 / std::sqrt(2.0);

  SUBCASE("tie goes to the positive section") {
    // u2 = (h, -h), v2 = (h, -h): mu+ = mu- = 1/2.
    f.u = DenseMatrix{{h, h}, {h, -h}};
    f.v = DenseMatrix{{h, h}, {h, -h}};
    const NmfFactors out = nndsvd_init(f, 2);
    const double scale = std::sqrt(1.0 * 0.5);
    CHECK(out.w(0, 1) == doctest::Approx(scale));
    CHECK(out.w(1, 1) == 0.0);
    CHECK(out.h(1, 0) == doctest::Approx(scale));
    CHECK(out.h(1, 1) == 0.0);
  }
  SUBCASE("negative section wins when larger") {
    // u2 = -(e2), v2 = -(e2): only a negative section.
    f.u = DenseMatrix{{1, 0}, {0, -1}};
    f.v = DenseMatrix{{1, 0}, {0, -1}};
    const NmfFactors out = nndsvd_init(f, 2);
    CHECK(out.w(0, 1) == 0.0);
    CHECK(out.w(1, 1) == doctest::Approx(1.0));
    CHECK(out.h(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("sections that cancel leave the column at zero") {
    // u2 positive, v2 negative: mu+ = |u+||v+| = 0 and mu- = |u-||v-| = 0.
    f.u = DenseMatrix{{0, 1}, {1, 0}};
    f.v = DenseMatrix{{1, -1}, {0, 0}};
    const NmfFactors out = nndsvd_init(f, 2);
    CHECK(out.w(0, 1) == 0.0);
    CHECK(out.w(1, 1) == 0.0);
    CHECK(out.h(1, 0) == 0.0);
    CHECK(out.h(1, 1) == 0.0);
  }
}

TEST_CASE("nndsvd-abs keeps every nonzero entry of mixed-sign vectors") {
  std::mt19937_64 rng(10);
  const DenseMatrix z = random_matrix(6, 5, rng);
  const SvdFactors s = svd(z);
  const NmfFactors a = nndsvd_abs_init(s, 3);
  const NmfFactors b = nndsvd_init(s, 3);
  bool mixed = false;
  for (std::size_t j = 1; j < 3; ++j) {
    for (std::size_t i = 0; i < 6; ++i) {
      if (s.u(i, j) != 0.0) CHECK(a.w(i, j) > 0.0);
      if (b.w(i, j) == 0.0) mixed = true;
    }
  }
  CHECK(mixed);  // NNDSVD zeroed the discarded section somewhere
}

TEST_CASE("random_init determinism and range") {
  const NmfFactors a = random_init(5, 7, 3, 42);
  const NmfFactors b = random_init(5, 7, 3, 42);
  CHECK(a.w == b.w);
  CHECK(a.h == b.h);
  for (double x : a.w.data()) CHECK((x > 0.0 && x < 1.0));
  for (double x : a.h.data()) CHECK((x > 0.0 && x < 1.0));
  const NmfFactors c = random_init(5, 7, 3, 1);
  const NmfFactors d = random_init(5, 7, 3, 2);
  CHECK(c.w != d.w);
}

TEST_CASE("random_init draws from mt19937_64 top 53 bits") {
  std::mt19937_64 engine(42);
  const double first = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
  CHECK(random_init(2, 2, 1, 42).w(0, 0) == first);
}

TEST_CASE("all initializers satisfy the factor invariants") {
  std::mt19937_64 rng(13);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{5, 7}, {20, 13}, {30, 30}}) {
    const DenseMatrix z = random_matrix(m, n, rng);
    const SvdFactors s = svd(z);
    for (std::size_t p = 1; p <= std::min(m, n); ++p) {
      for (InitMethod method : {InitMethod::svdnmf, InitMethod::nndsvd,
                                InitMethod::nndsvd_abs, InitMethod::random}) {
        const NmfFactors f = initialize(method, z, p, 7, &s);
        check_factors(f, m, n, p);
      }
    }
    // Rank one: u_1, v_1 have constant sign, so |.| changes nothing and the
    // product is the best rank-1 approximation.
    const NmfFactors sv = svd_nmf_init(s, 1);
    CHECK(frobenius_norm(subtract(z, matmul(sv.w, sv.h))) <= frobenius_norm(z));
  }
}

TEST_CASE("svd_nmf_init residual is not bounded by ||z|| at high rank") {
  // Summing |u_j| |sigma_j v_j^T| over many mixed-sign triplets overshoots a
  // dense matrix; the bound only holds for small p.
  std::mt19937_64 rng(13);
  (void)random_matrix(5, 7, rng);
  (void)random_matrix(20, 13, rng);
  const DenseMatrix z = random_matrix(30, 30, rng);
  const SvdFactors s = svd(z);
  const auto ratio = [&](std::size_t p) {
    const NmfFactors f = svd_nmf_init(s, p);
    return frobenius_norm(subtract(z, matmul(f.w, f.h))) / frobenius_norm(z);
  };
  CHECK(ratio(1) < 1.0);
  CHECK(ratio(5) < 1.0);
  CHECK(ratio(30) > 1.0);
}

TEST_CASE("initializers are pure functions of (z, p)") {
  std::mt19937_64 rng(14);
  const DenseMatrix z = random_matrix(9, 8, rng);
  for (InitMethod method :
       {InitMethod::svdnmf, InitMethod::nndsvd, InitMethod::nndsvd_abs}) {
    const NmfFactors a = initialize(method, z, 4, 0);
    const NmfFactors b = initialize(method, z, 4, 99);
    CHECK(a.w == b.w);
    CHECK(a.h == b.h);
  }
}

TEST_CASE("initializer errors") {
  const DenseMatrix z{{1, 2}, {3, 4}};
  CHECK_THROWS_AS(svd_nmf_init(z, 0), DomainError);
  CHECK_THROWS_AS(svd_nmf_init(z, 3), DomainError);
  CHECK_THROWS_AS(nndsvd_init(z, 3), DomainError);
  CHECK_THROWS_AS(nndsvd_abs_init(z, 0), DomainError);
  CHECK_THROWS_AS(initialize(InitMethod::random, z, 3, 1), DomainError);
  CHECK_THROWS_AS(svd_nmf_init(DenseMatrix{{1, -2}, {3, 4}}, 1), DomainError);
}

TEST_CASE("method names round-trip") {
  for (InitMethod m : {InitMethod::svdnmf, InitMethod::nndsvd,
                       InitMethod::nndsvd_abs, InitMethod::random}) {
    CHECK(parse_init_method(to_string(m)) == m);
  }
  CHECK_FALSE(parse_init_method("kmeans").has_value());
}

TEST_CASE("perturb_zeros only touches exact zeros") {
  NmfFactors f{DenseMatrix{{0, 2}}, DenseMatrix{{0}, {3}}, 2};
  perturb_zeros(f, 0.0);
  CHECK(f.w(0, 0) == 0.0);
  perturb_zeros(f, 1e-3);
  CHECK(f.w == DenseMatrix{{1e-3, 2}});
  CHECK(f.h == DenseMatrix{{1e-3}, {3}});
}
