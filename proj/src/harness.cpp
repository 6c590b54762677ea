#include "nmfinit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>

#include "nmfinit/svd.hpp"

namespace nmfinit {

namespace {

struct Task {
  std::string method;
  RunConfig config;
};

/// Runs every job on up to `threads` workers; results land at the job's index.
void run_parallel(std::vector<std::function<void()>>& jobs,
                  std::size_t threads) {
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min(threads, jobs.size());
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::size_t max_threads_from_env() {
  if (const char* env = std::getenv("NMFINIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

ComparisonReport compare(const DenseMatrix& z, const CompareConfig& config,
                         std::string input) {
  if (config.seeds.empty()) {
    throw std::invalid_argument("compare: at least one seed is required");
  }
  const SvdFactors factors = svd(z);
  std::optional<RankChoice> choice;
  const std::size_t p = resolve_rank(config.rank_policy, factors, &choice);

  RunConfig base;
  base.algorithm = config.algorithm;
  base.rank_policy = FixedRank{p};
  base.iterations = config.iterations;
  base.epsilon = config.epsilon;
  base.perturb = config.perturb;

  std::vector<Task> tasks;
  for (InitMethod m :
       {InitMethod::svdnmf, InitMethod::nndsvd, InitMethod::nndsvd_abs}) {
    RunConfig c = base;
    c.initializer = m;
    tasks.push_back({std::string(to_string(m)), c});
  }
  for (std::uint64_t seed : config.seeds) {
    RunConfig c = base;
    c.initializer = InitMethod::random;
    c.seed = seed;
    tasks.push_back({"random[seed=" + std::to_string(seed) + "]", c});
  }

  std::vector<ReportRow> results(tasks.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    jobs.emplace_back([&, i] {
      const ConvergenceTrace trace = run(z, tasks[i].config, &factors);
      const TraceRecord& last = trace.records.back();
      results[i] = ReportRow{tasks[i].method, p, last.error, last.elapsed_ms};
    });
  }
  run_parallel(jobs,
               config.threads == 0 ? max_threads_from_env() : config.threads);

  ComparisonReport report;
  report.input = std::move(input);
  report.algorithm = config.algorithm;
  report.iterations = config.iterations;
  report.p = p;
  const std::size_t deterministic = 3;
  report.rows.assign(results.begin(), results.begin() + deterministic);
  if (config.mean_over_seeds) {
    ReportRow mean{"random(mean of " + std::to_string(config.seeds.size()) + ")",
                   p, 0.0, 0.0};
    for (std::size_t i = deterministic; i < results.size(); ++i) {
      mean.error += results[i].error;
      mean.elapsed_ms += results[i].elapsed_ms;
    }
    const double n = static_cast<double>(config.seeds.size());
    mean.error /= n;
    mean.elapsed_ms /= n;
    report.rows.push_back(std::move(mean));
  } else {
    report.rows.insert(report.rows.end(), results.begin() + deterministic,
                       results.end());
  }
  return report;
}

std::string format_report_table(const ComparisonReport& report,
                                bool with_timing) {
  std::size_t width = 6;
  for (const auto& r : report.rows) width = std::max(width, r.method.size());

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "input: %s\nalgorithm: %s  iterations: %zu  p: %zu\n",
                report.input.empty() ? "-" : report.input.c_str(),
                std::string(to_string(report.algorithm)).c_str(),
                report.iterations, report.p);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-*s  %5s  %8s  %10s\n",
                static_cast<int>(width), "method", "p", "error", "elapsed_ms");
  out += buf;
  for (const auto& r : report.rows) {
    const long long ms = with_timing ? std::llround(r.elapsed_ms) : 0;
    std::snprintf(buf, sizeof buf, "%-*s  %5zu  %8.4f  %10lld\n",
                  static_cast<int>(width), r.method.c_str(), r.p, r.error, ms);
    out += buf;
  }
  return out;
}

std::string format_report_csv(const ComparisonReport& report,
                              bool with_timing) {
  std::string out = "method,p,error,elapsed_ms\n";
  char buf[256];
  for (const auto& r : report.rows) {
    const long long ms = with_timing ? std::llround(r.elapsed_ms) : 0;
    std::snprintf(buf, sizeof buf, "%s,%zu,%.6f,%lld\n", r.method.c_str(), r.p,
                  r.error, ms);
    out += buf;
  }
  return out;
}

}  // namespace nmfinit
