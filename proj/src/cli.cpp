#include "nmfinit/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "nmfinit/errors.hpp"
#include "nmfinit/harness.hpp"
#include "nmfinit/io.hpp"
#include "nmfinit/rank.hpp"
#include "nmfinit/solvers.hpp"
#include "nmfinit/svd.hpp"

namespace nmfinit {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

RankPolicy parse_rank_policy(const std::string& text, double threshold) {
  if (text == "auto") return AutoRank{threshold};
  std::size_t consumed = 0;
  unsigned long long p = 0;
  try {
    p = std::stoull(text, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != text.size() || text.empty() || text[0] == '-' || p == 0) {
    throw UsageError("--rank must be 'auto' or a positive integer, got '" +
                     text + "'");
  }
  return FixedRank{static_cast<std::size_t>(p)};
}

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw UsageError("--threshold must lie in (0, 1)");
  }
}

void warn_basic_rule(const RankChoice& c, std::size_t m, std::size_t n,
                     std::ostream& err) {
  if (!c.satisfies_basic_rule) {
    err << "warning: p=" << c.p << " violates the storage rule (m+n)p < mn for "
        << m << "x" << n << "\n";
  }
}

struct RankArgs {
  std::string input;
  double threshold = kDefaultEnergyThreshold;
};

struct SvdArgs {
  std::string input;
  std::size_t count = 0;
};

struct RunArgs {
  std::string input;
  std::string algo = "mm";
  std::string init = "svdnmf";
  std::string rank = "auto";
  double threshold = kDefaultEnergyThreshold;
  std::size_t iters = 100;
  std::uint64_t seed = 0;
  double eps = kDefaultEpsilon;
  double perturb = 0.0;
  std::size_t trace_every = 1;
  double stop_tol = 0.0;
  std::string trace_path;
  std::string recon_path;
  bool no_timing = false;
};

struct CompareArgs {
  std::string input;
  std::string algo = "mm";
  std::string rank = "auto";
  double threshold = kDefaultEnergyThreshold;
  std::size_t iters = 100;
  std::vector<std::uint64_t> seeds{1};
  bool mean = false;
  double eps = kDefaultEpsilon;
  double perturb = 0.0;
  std::size_t threads = 0;
  std::string csv_path;
  bool no_timing = false;
};

int cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
  check_threshold(a.threshold);
  const DenseMatrix z = read_matrix(a.input, false);
  const SvdFactors f = svd(z);
  const RankChoice c =
      choose_rank_for_shape(f.sigma, z.rows(), z.cols(), a.threshold);
  out << format("p=%zu\nenergy_ratio=%.6f\nbasic_rule=%s\n", c.p,
                c.energy_ratio,
                c.satisfies_basic_rule ? "satisfied" : "violated");
  warn_basic_rule(c, z.rows(), z.cols(), err);
  return kExitOk;
}

int cmd_svd(const SvdArgs& a, std::ostream& out) {
  const DenseMatrix z = read_matrix(a.input, false);
  const SvdFactors f = svd(z);
  const std::size_t count =
      a.count == 0 ? f.sigma.size() : std::min(a.count, f.sigma.size());
  out << "index,sigma\n";
  for (std::size_t i = 0; i < count; ++i) {
    out << format("%zu,%.12g\n", i + 1, f.sigma[i]);
  }
  return kExitOk;
}

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  check_threshold(a.threshold);
  RunConfig config;
  config.algorithm = *parse_algorithm(a.algo);
  config.initializer = *parse_init_method(a.init);
  config.rank_policy = parse_rank_policy(a.rank, a.threshold);
  if (a.iters < 1) throw UsageError("--iters must be >= 1");
  if (a.trace_every < 1) throw UsageError("--trace-every must be >= 1");
  if (a.eps < 0.0) throw UsageError("--eps must be >= 0");
  if (a.perturb < 0.0) throw UsageError("--perturb must be >= 0");
  config.iterations = a.iters;
  config.seed = a.seed;
  config.epsilon = a.eps;
  config.perturb = a.perturb;
  config.trace_every = a.trace_every;
  config.stop_tolerance = a.stop_tol;

  const DenseMatrix z = read_matrix(a.input, true);
  const ConvergenceTrace trace = run(z, config);

  if (trace.rank_choice) {
    out << format("p=%zu (auto, energy_ratio=%.6f)\n", trace.rank_choice->p,
                  trace.rank_choice->energy_ratio);
    warn_basic_rule(*trace.rank_choice, z.rows(), z.cols(), err);
  } else {
    out << format("p=%zu (fixed)\n", trace.final_factors.p);
  }
  if (!a.trace_path.empty()) {
    write_trace_csv(trace, a.trace_path, !a.no_timing);
  }
  if (!a.recon_path.empty()) {
    write_pgm(matmul(trace.final_factors.w, trace.final_factors.h),
              a.recon_path);
  }
  out << format("iterations %zu\nfinal error %.6f\n",
                trace.records.back().iteration, trace.records.back().error);
  return kExitOk;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  check_threshold(a.threshold);
  if (a.iters < 1) throw UsageError("--iters must be >= 1");
  if (a.seeds.empty()) throw UsageError("--seeds needs at least one seed");
  CompareConfig config;
  config.algorithm = *parse_algorithm(a.algo);
  config.iterations = a.iters;
  config.rank_policy = parse_rank_policy(a.rank, a.threshold);
  config.seeds = a.seeds;
  config.mean_over_seeds = a.mean;
  config.epsilon = a.eps;
  config.perturb = a.perturb;
  config.threads = a.threads;

  const DenseMatrix z = read_matrix(a.input, true);
  const ComparisonReport report = compare(z, config, a.input);
  if (!basic_rule_check(z.rows(), z.cols(), report.p)) {
    err << "warning: p=" << report.p
        << " violates the storage rule (m+n)p < mn for " << z.rows() << "x"
        << z.cols() << "\n";
  }
  out << format_report_table(report, !a.no_timing);
  if (!a.csv_path.empty()) {
    write_file(a.csv_path, format_report_csv(report, !a.no_timing));
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"SVD-based rank selection and initialization for NMF",
               "nmfinit"};
  app.require_subcommand(1);

  const std::vector<std::string> algorithms{"mm", "lnmf"};
  const std::vector<std::string> initializers{"svdnmf", "nndsvd", "nndsvd-abs",
                                              "random"};

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank", "Choose the factorization rank");
  rank->add_option("input", rank_args.input, "PGM or CSV matrix")->required();
  rank->add_option("--threshold", rank_args.threshold,
                   "Singular-value energy fraction");

  SvdArgs svd_args;
  auto* svd_cmd = app.add_subcommand("svd", "Print singular values");
  svd_cmd->add_option("input", svd_args.input, "PGM or CSV matrix")->required();
  svd_cmd->add_option("--count", svd_args.count, "Print only the first K");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Initialize and factorize");
  run_cmd->add_option("input", run_args.input, "PGM or CSV matrix")->required();
  run_cmd->add_option("--algo", run_args.algo)->check(CLI::IsMember(algorithms));
  run_cmd->add_option("--init", run_args.init)
      ->check(CLI::IsMember(initializers));
  run_cmd->add_option("--rank", run_args.rank, "auto or a positive integer");
  run_cmd->add_option("--threshold", run_args.threshold);
  run_cmd->add_option("--iters", run_args.iters);
  run_cmd->add_option("--seed", run_args.seed);
  run_cmd->add_option("--eps", run_args.eps, "Denominator guard");
  run_cmd->add_option("--perturb", run_args.perturb,
                      "Value given to exact zeros of the initial factors");
  run_cmd->add_option("--trace-every", run_args.trace_every);
  run_cmd->add_option("--stop-tol", run_args.stop_tol,
                      "Stop when an iteration improves the error by less");
  run_cmd->add_option("--trace", run_args.trace_path, "Trace CSV output");
  run_cmd->add_option("--recon", run_args.recon_path, "Reconstruction PGM");
  run_cmd->add_flag("--no-timing", run_args.no_timing,
                    "Write 0 for every elapsed time");

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "Compare initializers");
  cmp->add_option("input", cmp_args.input, "PGM or CSV matrix")->required();
  cmp->add_option("--algo", cmp_args.algo)->check(CLI::IsMember(algorithms));
  cmp->add_option("--rank", cmp_args.rank, "auto or a positive integer");
  cmp->add_option("--threshold", cmp_args.threshold);
  cmp->add_option("--iters", cmp_args.iters);
  cmp->add_option("--seeds", cmp_args.seeds, "Comma-separated random seeds")
      ->delimiter(',');
  cmp->add_flag("--mean", cmp_args.mean, "Average the random rows");
  cmp->add_option("--eps", cmp_args.eps);
  cmp->add_option("--perturb", cmp_args.perturb);
  cmp->add_option("--threads", cmp_args.threads);
  cmp->add_option("--csv", cmp_args.csv_path, "Report CSV output");
  cmp->add_flag("--no-timing", cmp_args.no_timing);

  std::vector<const char*> argv{"nmfinit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'nmfinit --help' for usage\n";
    return kExitUsageError;
  }

  try {
    if (*rank) return cmd_rank(rank_args, out, err);
    if (*svd_cmd) return cmd_svd(svd_args, out);
    if (*run_cmd) return cmd_run(run_args, out, err);
    if (*cmp) return cmd_compare(cmp_args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitUsageError;
}

}  // namespace nmfinit
