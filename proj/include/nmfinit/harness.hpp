#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nmfinit/matrix.hpp"
#include "nmfinit/solvers.hpp"

namespace nmfinit {

struct ReportRow {
  std::string method;
  std::size_t p = 0;
  double error = 0.0;
  double elapsed_ms = 0.0;
};

/// One row per initializer, all at the same rank and iteration budget.
struct ComparisonReport {
  std::string input;
  Algorithm algorithm = Algorithm::mm;
  std::size_t iterations = 0;
  std::size_t p = 0;
  std::vector<ReportRow> rows;
};

struct CompareConfig {
  Algorithm algorithm = Algorithm::mm;
  std::size_t iterations = 100;
  RankPolicy rank_policy = AutoRank{};
  std::vector<std::uint64_t> seeds{1};
  /// One "random" row averaging the seeds instead of one row per seed.
  bool mean_over_seeds = false;
  double epsilon = kDefaultEpsilon;
  double perturb = 0.0;
  /// Worker threads; 0 means max_threads_from_env().
  std::size_t threads = 0;
};

/// Runs svdnmf, nndsvd, nndsvd-abs and random from a single shared SVD.
/// Rows come back in that order (random rows by ascending seed position)
/// regardless of how the runs were scheduled.
ComparisonReport compare(const DenseMatrix& z, const CompareConfig& config,
                         std::string input = {});

/// Aligned text table, errors to four decimals.
std::string format_report_table(const ComparisonReport& report,
                                bool with_timing);

/// `method,p,error,elapsed_ms` header and one line per row.
std::string format_report_csv(const ComparisonReport& report, bool with_timing);

/// NMFINIT_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
std::size_t max_threads_from_env();

}  // namespace nmfinit
