#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "nmfinit/init.hpp"
#include "nmfinit/matrix.hpp"
#include "nmfinit/rank.hpp"
#include "nmfinit/svd.hpp"

namespace nmfinit {

enum class Algorithm { mm, lnmf };

std::string_view to_string(Algorithm algorithm) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

inline constexpr double kDefaultEpsilon = 1e-9;

/// Pick p with the energy rule on the input's spectrum.
struct AutoRank {
  double threshold = kDefaultEnergyThreshold;
};

struct FixedRank {
  std::size_t p = 1;
};

using RankPolicy = std::variant<AutoRank, FixedRank>;

struct RunConfig {
  Algorithm algorithm = Algorithm::mm;
  InitMethod initializer = InitMethod::svdnmf;
  RankPolicy rank_policy = AutoRank{};
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  /// Added to every update denominator.
  double epsilon = kDefaultEpsilon;
  /// Record every `trace_every` iterations (iteration 0 and the last one are
  /// always recorded).
  std::size_t trace_every = 1;
  /// Added to exact zeros of the initial factors; 0 keeps them locked.
  double perturb = 0.0;
  /// Off when 0. Otherwise stop once an iteration lowers the relative error
  /// by less than this amount.
  double stop_tolerance = 0.0;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double error = 0.0;
  double elapsed_ms = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  NmfFactors final_factors;
  /// Set when the rank came from the energy rule.
  std::optional<RankChoice> rank_choice;
};

struct StepResult {
  DenseMatrix w;
  DenseMatrix h;
};

/// One Lee-Seung multiplicative step for the Frobenius objective:
///   H <- H .* (W^T A) ./ (W^T W H + eps)
///   W <- W .* (A H^T) ./ (W H H^T + eps)     (using the new H)
StepResult mm_step(const DenseMatrix& a, const DenseMatrix& w,
                   const DenseMatrix& h, double epsilon);

/// LNMF step as printed: square-root H update, then the MM W update.
///   H <- sqrt(H .* (W^T (A ./ (W H + eps))))
StepResult lnmf_step(const DenseMatrix& a, const DenseMatrix& w,
                     const DenseMatrix& h, double epsilon);

/// ||Z - W H||_F / ||Z||_F. Throws DegenerateInputError for an all-zero Z.
double rel_error(const DenseMatrix& z, const DenseMatrix& w,
                 const DenseMatrix& h);

/// Generalized KL divergence D(Z || WH) = sum z log(z / wh) - z + wh, with
/// 0 log 0 = 0 and `epsilon` guarding the ratio and the log argument.
double kl_divergence(const DenseMatrix& z, const DenseMatrix& w,
                     const DenseMatrix& h, double epsilon);

/// Resolves the rank, builds the initial factors, runs exactly
/// `config.iterations` steps (unless stop_tolerance is set) and records the
/// relative error along the way. `svd_cache`, when given, must be svd(z).
ConvergenceTrace run(const DenseMatrix& z, const RunConfig& config,
                     const SvdFactors* svd_cache = nullptr);

/// The rank `run` would use for this policy.
std::size_t resolve_rank(const RankPolicy& policy, const SvdFactors& f,
                         std::optional<RankChoice>* choice = nullptr);

}  // namespace nmfinit
