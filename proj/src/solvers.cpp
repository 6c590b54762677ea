#include "nmfinit/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "nmfinit/errors.hpp"

namespace nmfinit {

namespace {

void check_step_shapes(const DenseMatrix& a, const DenseMatrix& w,
                       const DenseMatrix& h) {
  if (w.rows() != a.rows() || h.cols() != a.cols() || w.cols() != h.rows()) {
    throw ShapeError("step: incompatible shapes A " + a.shape_string() +
                     ", W " + w.shape_string() + ", H " + h.shape_string());
  }
}

/// x .* numer ./ (denom + eps), entrywise.
DenseMatrix multiplicative_update(const DenseMatrix& x, const DenseMatrix& numer,
                                  const DenseMatrix& denom, double epsilon,
                                  const char* what) {
  DenseMatrix out = x;
  auto dst = out.data();
  auto num = numer.data();
  auto den = denom.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = dst[i] * num[i] / (den[i] + epsilon);
    if (!std::isfinite(dst[i]) || dst[i] < 0.0) {
      throw InternalError(std::string(what) +
                          ": update produced a non-finite or negative entry "
                          "(denominator guard failed)");
    }
  }
  return out;
}

DenseMatrix update_w(const DenseMatrix& a, const DenseMatrix& w,
                     const DenseMatrix& h, double epsilon) {
  const DenseMatrix ht = transpose(h);
  const DenseMatrix numer = matmul(a, ht);
  const DenseMatrix denom = matmul(w, matmul(h, ht));
  return multiplicative_update(w, numer, denom, epsilon, "W update");
}

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::mm:
      return "mm";
    case Algorithm::lnmf:
      return "lnmf";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  if (name == "mm") return Algorithm::mm;
  if (name == "lnmf") return Algorithm::lnmf;
  return std::nullopt;
}

StepResult mm_step(const DenseMatrix& a, const DenseMatrix& w,
                   const DenseMatrix& h, double epsilon) {
  check_step_shapes(a, w, h);
  const DenseMatrix wt = transpose(w);
  const DenseMatrix numer = matmul(wt, a);
  const DenseMatrix denom = matmul(matmul(wt, w), h);
  DenseMatrix h_next = multiplicative_update(h, numer, denom, epsilon, "H update");
  DenseMatrix w_next = update_w(a, w, h_next, epsilon);
  return {std::move(w_next), std::move(h_next)};
}

StepResult lnmf_step(const DenseMatrix& a, const DenseMatrix& w,
                     const DenseMatrix& h, double epsilon) {
  check_step_shapes(a, w, h);
  const DenseMatrix wh = matmul(w, h);
  DenseMatrix ratio = a;
  {
    auto dst = ratio.data();
    auto den = wh.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] /= den[i] + epsilon;
      if (!std::isfinite(dst[i])) {
        throw InternalError("LNMF H update: non-finite ratio A ./ (WH)");
      }
    }
  }
  DenseMatrix h_next = hadamard(h, matmul(transpose(w), ratio));
  for (double x : h_next.data()) {
    if (x < 0.0 || !std::isfinite(x)) {
      throw InternalError("LNMF H update: negative or non-finite value under sqrt");
    }
  }
  h_next = sqrt(h_next);
  DenseMatrix w_next = update_w(a, w, h_next, epsilon);
  return {std::move(w_next), std::move(h_next)};
}

double rel_error(const DenseMatrix& z, const DenseMatrix& w,
                 const DenseMatrix& h) {
  const double denom = frobenius_norm(z);
  if (denom == 0.0) {
    throw DegenerateInputError("rel_error: reference matrix is all zero");
  }
  const DenseMatrix wh = matmul(w, h);
  if (wh.rows() != z.rows() || wh.cols() != z.cols()) {
    throw ShapeError("rel_error: Z " + z.shape_string() + " vs WH " +
                     wh.shape_string());
  }
  return frobenius_norm(subtract(z, wh)) / denom;
}

double kl_divergence(const DenseMatrix& z, const DenseMatrix& w,
                     const DenseMatrix& h, double epsilon) {
  const DenseMatrix wh = matmul(w, h);
  if (wh.rows() != z.rows() || wh.cols() != z.cols()) {
    throw ShapeError("kl_divergence: Z " + z.shape_string() + " vs WH " +
                     wh.shape_string());
  }
  auto zs = z.data();
  auto qs = wh.data();
  double total = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const double zi = zs[i];
    if (zi == 0.0) {
      total += qs[i];
      continue;
    }
    // z log(z/q) - z + q = z (d - log1p(d)) with d = q/z - 1; each term >= 0.
    const double q = std::max(qs[i], epsilon);
    const double d = q / zi - 1.0;
    total += zi * std::max(0.0, d - std::log1p(d));
  }
  return total;
}

std::size_t resolve_rank(const RankPolicy& policy, const SvdFactors& f,
                         std::optional<RankChoice>* choice) {
  if (const auto* fixed = std::get_if<FixedRank>(&policy)) {
    return fixed->p;
  }
  const auto& autorank = std::get<AutoRank>(policy);
  RankChoice c = choose_rank_for_shape(f.sigma, f.rows(), f.cols(),
                                       autorank.threshold);
  if (choice != nullptr) *choice = c;
  return c.p;
}

ConvergenceTrace run(const DenseMatrix& z, const RunConfig& config,
                     const SvdFactors* svd_cache) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed_ms = [&start] {
    return std::chrono::duration<double, std::milli>(Clock::now() - start)
        .count();
  };

  if (config.iterations < 1) {
    throw std::invalid_argument("run: iterations must be >= 1");
  }
  if (!(config.epsilon >= 0.0)) {
    throw std::invalid_argument("run: epsilon must be >= 0");
  }
  if (config.trace_every < 1) {
    throw std::invalid_argument("run: trace_every must be >= 1");
  }
  if (!all_finite(z) || !all_nonnegative(z)) {
    throw DomainError("run: input must be finite and nonnegative");
  }
  if (frobenius_norm(z) == 0.0) {
    throw DegenerateInputError("run: input matrix is all zero");
  }

  const bool needs_svd = std::holds_alternative<AutoRank>(config.rank_policy) ||
                         config.initializer != InitMethod::random;
  std::optional<SvdFactors> local;
  if (needs_svd && svd_cache == nullptr) {
    local = svd(z);
    svd_cache = &*local;
  }

  ConvergenceTrace trace;
  std::size_t p = 0;
  if (needs_svd) {
    p = resolve_rank(config.rank_policy, *svd_cache, &trace.rank_choice);
  } else {
    p = std::get<FixedRank>(config.rank_policy).p;
  }
  const std::size_t max_rank = std::min(z.rows(), z.cols());
  if (p < 1 || p > max_rank) {
    throw DomainError("run: rank " + std::to_string(p) + " outside [1, " +
                      std::to_string(max_rank) + "]");
  }

  NmfFactors factors =
      initialize(config.initializer, z, p, config.seed, svd_cache);
  perturb_zeros(factors, config.perturb);

  double previous = rel_error(z, factors.w, factors.h);
  trace.records.push_back({0, previous, elapsed_ms()});

  for (std::size_t it = 1; it <= config.iterations; ++it) {
    StepResult next = config.algorithm == Algorithm::mm
                          ? mm_step(z, factors.w, factors.h, config.epsilon)
                          : lnmf_step(z, factors.w, factors.h, config.epsilon);
    factors.w = std::move(next.w);
    factors.h = std::move(next.h);

    const bool last = it == config.iterations;
    const bool checkpoint = it % config.trace_every == 0;
    if (!last && !checkpoint && config.stop_tolerance <= 0.0) continue;

    const double error = rel_error(z, factors.w, factors.h);
    const bool stalled =
        config.stop_tolerance > 0.0 && previous - error < config.stop_tolerance;
    if (last || checkpoint || stalled) {
      trace.records.push_back({it, error, elapsed_ms()});
    }
    previous = error;
    if (stalled) break;
  }
  trace.final_factors = std::move(factors);
  return trace;
}

}  // namespace nmfinit
