#pragma once

#include <cstddef>
#include <span>

namespace nmfinit {

inline constexpr double kDefaultEnergyThreshold = 0.90;

struct RankChoice {
  std::size_t p = 0;
  /// (sigma_1 + ... + sigma_p) / (sum of all sigma).
  double energy_ratio = 0.0;
  /// Whether (m + n) p < m n. Only filled in by choose_rank_for_shape.
  bool satisfies_basic_rule = false;
};

/// Smallest p whose leading singular values reach `threshold` of the total
/// singular-value sum. The scan mirrors the reference loop: accumulate
/// sigma_1, sigma_2, ... until the running ratio is no longer below the
/// threshold, and report the index that crossed it. The denominator sums all
/// entries, including numerically zero ones.
///
/// Throws std::invalid_argument for an empty or non-descending spectrum or a
/// threshold outside (0, 1), and DegenerateInputError when every entry is 0.
RankChoice choose_rank(std::span<const double> sigma,
                       double threshold = kDefaultEnergyThreshold);

/// choose_rank plus the storage check for an m x n matrix.
RankChoice choose_rank_for_shape(std::span<const double> sigma, std::size_t m,
                                 std::size_t n,
                                 double threshold = kDefaultEnergyThreshold);

/// (m + n) p < m n: a rank-p factorization stores fewer numbers than Z.
bool basic_rule_check(std::size_t m, std::size_t n, std::size_t p);

}  // namespace nmfinit
