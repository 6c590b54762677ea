#include <doctest.h>

#include <cmath>
#include <random>

#include "nmfinit/errors.hpp"
#include "nmfinit/solvers.hpp"
#include "test_support.hpp"

using namespace nmfinit;
using nmfinit::testing::max_abs_diff;
using nmfinit::testing::random_matrix;

TEST_CASE("mm_step hand-evaluated example") {
  const DenseMatrix a{{1, 2}, {3, 4}};
  const DenseMatrix w{{1}, {1}};
  const DenseMatrix h{{1, 1}};
  const StepResult r = mm_step(a, w, h, 0.0);
  // W^T A = [4, 6], W^T W H = [2, 2].
  CHECK(r.h == DenseMatrix{{2, 3}});
  // A H'^T = [8; 18], W H' H'^T = [13; 13].
  CHECK(std::fabs(r.w(0, 0) - 8.0 / 13.0) <= 1e-14);
  CHECK(std::fabs(r.w(1, 0) - 18.0 / 13.0) <= 1e-14);
}

TEST_CASE("lnmf_step hand-evaluated example") {
  const DenseMatrix a{{1, 2}, {3, 4}};
  const DenseMatrix w{{1}, {1}};
  const DenseMatrix h{{1, 1}};
  const StepResult r = lnmf_step(a, w, h, 0.0);
  // WH = 1, A ./ WH = A, W^T (.) = [4, 6], H' = sqrt([4, 6]).
  CHECK(r.h(0, 0) == 2.0);
  CHECK(std::fabs(r.h(0, 1) - std::sqrt(6.0)) <= 1e-14);
  // W' = W .* (A H'^T) ./ (W H' H'^T): H'H'^T = 10.
  const double s6 = std::sqrt(6.0);
  CHECK(std::fabs(r.w(0, 0) - (2 + 2 * s6) / 10.0) <= 1e-14);
  CHECK(std::fabs(r.w(1, 0) - (6 + 4 * s6) / 10.0) <= 1e-14);
}

TEST_CASE("exact positive factorization is an MM fixed point") {
  std::mt19937_64 rng(3);
  const DenseMatrix w = random_matrix(6, 3, rng, 0.5, 1.5);
  const DenseMatrix h = random_matrix(3, 5, rng, 0.5, 1.5);
  const DenseMatrix a = matmul(w, h);
  const StepResult r = mm_step(a, w, h, 0.0);
  CHECK(nmfinit::testing::relative_diff(r.w, w) <= 1e-12);
  CHECK(nmfinit::testing::relative_diff(r.h, h) <= 1e-12);
}

TEST_CASE("printed LNMF rule does not fix an exact factorization") {
  const DenseMatrix w{{1}, {2}};
  const DenseMatrix h{{1, 3}};
  const DenseMatrix a = matmul(w, h);
  const StepResult r = lnmf_step(a, w, h, 0.0);
  // A ./ WH = 1, so H' = sqrt(H .* (W^T 1)) = sqrt([3, 9]).
  CHECK(r.h(0, 0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(r.h(0, 1) == doctest::Approx(3.0));
  CHECK(r.h != h);
}

TEST_CASE("zero rows stay zero") {
  std::mt19937_64 rng(4);
  const DenseMatrix a = random_matrix(5, 4, rng);
  DenseMatrix w = random_matrix(5, 2, rng);
  DenseMatrix h = random_matrix(2, 4, rng);
  for (std::size_t j = 0; j < 2; ++j) w(2, j) = 0.0;
  for (int it = 0; it < 50; ++it) {
    StepResult r = mm_step(a, w, h, kDefaultEpsilon);
    w = std::move(r.w);
    h = std::move(r.h);
    CHECK(w(2, 0) == 0.0);
    CHECK(w(2, 1) == 0.0);
  }
}

TEST_CASE("steps stay nonnegative and finite") {
  std::mt19937_64 rng(5);
  const DenseMatrix a = random_matrix(12, 9, rng);
  DenseMatrix w = random_matrix(12, 4, rng);
  DenseMatrix h = random_matrix(4, 9, rng);
  for (int it = 0; it < 300; ++it) {
    StepResult r = lnmf_step(a, w, h, kDefaultEpsilon);
    w = std::move(r.w);
    h = std::move(r.h);
    REQUIRE(all_finite(w));
    REQUIRE(all_finite(h));
    REQUIRE(all_nonnegative(w));
    REQUIRE(all_nonnegative(h));
  }
}

TEST_CASE("steps reject incompatible shapes") {
  const DenseMatrix a(3, 4, 1.0);
  CHECK_THROWS_AS(mm_step(a, DenseMatrix(3, 2, 1.0), DenseMatrix(3, 4, 1.0), 0),
                  ShapeError);
  CHECK_THROWS_AS(lnmf_step(a, DenseMatrix(2, 2, 1.0), DenseMatrix(2, 4, 1.0), 0),
                  ShapeError);
}

TEST_CASE("zero denominators without a guard are an internal error") {
  const DenseMatrix a{{1, 1}};
  const DenseMatrix w{{0}};
  const DenseMatrix h{{1, 1}};
  CHECK_THROWS_AS(mm_step(a, w, h, 0.0), InternalError);
  CHECK_NOTHROW(mm_step(a, w, h, kDefaultEpsilon));
}

TEST_CASE("rel_error examples") {
  const DenseMatrix z{{1, 2}, {3, 4}};
  CHECK(rel_error(z, DenseMatrix{{1, 0}, {0, 1}}, z) == 0.0);
  CHECK(rel_error(z, DenseMatrix(2, 1), DenseMatrix(1, 2, 5.0)) == 1.0);
  // W H = [[1,2],[3,0]]: residual norm 4, ||Z|| = sqrt(30).
  const double e = rel_error(z, DenseMatrix::identity(2), DenseMatrix{{1, 2}, {3, 0}});
  CHECK(e == doctest::Approx(4.0 / std::sqrt(30.0)).epsilon(1e-15));
  CHECK(e == doctest::Approx(0.7303).epsilon(1e-4));
  CHECK_THROWS_AS(rel_error(DenseMatrix(2, 2), DenseMatrix::identity(2),
                            DenseMatrix::identity(2)),
                  DegenerateInputError);
}

TEST_CASE("kl_divergence") {
  const DenseMatrix z{{1, 2}, {3, 4}};
  CHECK(kl_divergence(z, DenseMatrix::identity(2), z, kDefaultEpsilon) == 0.0);
  CHECK(kl_divergence(DenseMatrix{{2}}, DenseMatrix{{1}}, DenseMatrix{{1}}, 0.0) ==
        doctest::Approx(2 * std::log(2.0) - 1).epsilon(1e-15));
  CHECK(kl_divergence(DenseMatrix{{2}}, DenseMatrix{{1}}, DenseMatrix{{1}}, 0.0) ==
        doctest::Approx(0.3863).epsilon(1e-4));
  // 0 log 0 = 0: the term reduces to (WH)_ij.
  CHECK(kl_divergence(DenseMatrix{{0}}, DenseMatrix{{1}}, DenseMatrix{{0.5}}, 0.0) ==
        0.5);
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const DenseMatrix zz = random_matrix(4, 5, rng);
    const DenseMatrix w = random_matrix(4, 2, rng);
    const DenseMatrix h = random_matrix(2, 5, rng);
    CHECK(kl_divergence(zz, w, h, kDefaultEpsilon) >= 0.0);
  }
}

TEST_CASE("run: exact SVD-NMF start on a diagonal matrix stays exact") {
  const DenseMatrix z{{4, 0}, {0, 3}};
  RunConfig config;
  config.rank_policy = FixedRank{2};
  config.iterations = 10;
  const ConvergenceTrace trace = run(z, config);
  REQUIRE(trace.records.size() == 11);
  for (const TraceRecord& r : trace.records) CHECK(r.error <= 1e-9);
  CHECK(trace.records.front().error == 0.0);
}

TEST_CASE("run: random init is reproducible") {
  std::mt19937_64 rng(7);
  const DenseMatrix z = random_matrix(10, 8, rng);
  RunConfig config;
  config.initializer = InitMethod::random;
  config.rank_policy = FixedRank{3};
  config.seed = 11;
  const ConvergenceTrace a = run(z, config);
  const ConvergenceTrace b = run(z, config);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].iteration == b.records[i].iteration);
    CHECK(a.records[i].error == b.records[i].error);
  }
  CHECK(a.final_factors.w == b.final_factors.w);
}

TEST_CASE("run: trace bookkeeping") {
  std::mt19937_64 rng(8);
  const DenseMatrix z = random_matrix(10, 8, rng);
  RunConfig config;
  config.iterations = 10;
  config.trace_every = 4;
  config.rank_policy = AutoRank{0.9};
  const ConvergenceTrace t = run(z, config);
  std::vector<std::size_t> its;
  for (const auto& r : t.records) its.push_back(r.iteration);
  CHECK(its == std::vector<std::size_t>{0, 4, 8, 10});
  REQUIRE(t.rank_choice.has_value());
  CHECK(t.final_factors.p == t.rank_choice->p);
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    CHECK(t.records[i].elapsed_ms >= t.records[i - 1].elapsed_ms);
  }
}

TEST_CASE("run: optional early stop") {
  std::mt19937_64 rng(9);
  const DenseMatrix z = random_matrix(10, 8, rng);
  RunConfig config;
  config.iterations = 5000;
  config.rank_policy = FixedRank{3};
  config.stop_tolerance = 1e-6;
  const ConvergenceTrace t = run(z, config);
  CHECK(t.records.back().iteration < 5000);
  config.stop_tolerance = 0.0;
  config.iterations = 20;
  CHECK(run(z, config).records.back().iteration == 20);
}

TEST_CASE("run: perturb unlocks zeros") {
  const DenseMatrix z{{4, 0}, {0, 3}};
  RunConfig config;
  config.rank_policy = FixedRank{2};
  config.iterations = 1;
  config.perturb = 1e-4;
  const ConvergenceTrace t = run(z, config);
  CHECK(t.final_factors.w(0, 1) > 0.0);
}

TEST_CASE("run: errors") {
  RunConfig config;
  CHECK_THROWS_AS(run(DenseMatrix(2, 2), config), DegenerateInputError);
  CHECK_THROWS_AS(run(DenseMatrix{{1, -1}}, config), DomainError);
  config.rank_policy = FixedRank{5};
  CHECK_THROWS_AS(run(DenseMatrix{{1, 2}, {3, 4}}, config), DomainError);
  config.rank_policy = FixedRank{1};
  config.iterations = 0;
  CHECK_THROWS_AS(run(DenseMatrix{{1, 2}, {3, 4}}, config), std::invalid_argument);
}

TEST_CASE("MM error never increases") {
  std::mt19937_64 rng(10);
  const DenseMatrix z = random_matrix(15, 12, rng);
  for (InitMethod m : {InitMethod::svdnmf, InitMethod::nndsvd,
                       InitMethod::nndsvd_abs, InitMethod::random}) {
    RunConfig config;
    config.initializer = m;
    config.rank_policy = FixedRank{4};
    config.iterations = 100;
    config.seed = 3;
    const ConvergenceTrace t = run(z, config);
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      CHECK(t.records[i].error <= t.records[i - 1].error + 1e-12);
    }
  }
}

TEST_CASE("algorithm names round-trip") {
  CHECK(parse_algorithm("mm") == Algorithm::mm);
  CHECK(parse_algorithm(to_string(Algorithm::lnmf)) == Algorithm::lnmf);
  CHECK_FALSE(parse_algorithm("als").has_value());
}
