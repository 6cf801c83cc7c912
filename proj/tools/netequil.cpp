// netequil: batch front end for the network equilibrium solver.
//
// Exit codes: 0 converged / check passed, 1 input error, 2 iteration limit
// (or check above tolerance), 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "netequil/errors.hpp"
#include "netequil/oracle.hpp"
#include "netequil/problem_io.hpp"
#include "netequil/selftest.hpp"
#include "netequil/solver.hpp"

namespace {

using namespace netequil;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIterLimit = 2;
constexpr int kExitNumerical = 3;

struct SolveOptions {
  std::string problem;
  std::string out;
  std::string trace;
  std::optional<double> tol;
  std::optional<std::size_t> max_iter;
  std::optional<std::string> scheduler;
  std::optional<std::size_t> sweep_bound;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool trace_timing = false;
  bool quiet = false;
};

struct CheckOptions {
  std::string problem;
  std::string solution;
  std::optional<double> tol;
};

void print_warnings(const io::ParsedProblem& p) {
  for (const auto& w : p.warnings) std::cerr << "warning: " << w.format() << '\n';
}

std::optional<int> env_threads() {
  const char* raw = std::getenv("NETEQUIL_THREADS");
  if (!raw || !*raw) return std::nullopt;
  auto v = io::parse_number(raw);
  if (!v || *v < 0 || *v != static_cast<int>(*v)) {
    throw ConfigError(std::string("NETEQUIL_THREADS: not a nonnegative integer: ") + raw);
  }
  return static_cast<int>(*v);
}

int run_solve(const SolveOptions& opt) {
  io::ParsedProblem p = io::parse_problem_file(opt.problem);
  print_warnings(p);
  SolverConfig& cfg = p.cfg;

  if (opt.tol) cfg.tol = *opt.tol;
  if (opt.max_iter) cfg.max_iter = *opt.max_iter;
  if (opt.scheduler) {
    cfg.scheduler = io::parse_scheduler(*opt.scheduler, p.net);
    // Smallest sweep bound the group count allows, unless given explicitly.
    if (const auto* rr = std::get_if<RoundRobin>(&cfg.scheduler)) {
      cfg.sweep_bound = std::max(cfg.sweep_bound, rr->arc_groups.size() - 1);
    }
  }
  if (opt.sweep_bound) cfg.sweep_bound = *opt.sweep_bound;
  if (opt.seed) {
    if (auto* rs = std::get_if<RandomSweep>(&cfg.scheduler)) rs->seed = *opt.seed;
  }
  const std::optional<int> threads = opt.threads ? opt.threads : env_threads();
  if (threads) {
    cfg.execution = Execution::Parallel;
    cfg.threads = *threads;
  }
  cfg.record_timing = opt.trace_timing;
  cfg.keep_trace = false;

  std::unique_ptr<std::ofstream> trace;
  if (!opt.trace.empty()) {
    trace = std::make_unique<std::ofstream>(opt.trace);
    if (!*trace) throw ConfigError("cannot write trace file '" + opt.trace + "'");
    *trace << io::kTraceHeader << '\n';
  }

  const Solver solver(p.net, p.ops, cfg);
  auto on_trace = [&](const TraceRecord& rec) {
    if (trace) *trace << io::trace_row(rec) << '\n';
  };
  // Only stop where `check` would agree.
  auto accept = [&](const SolverState& s) {
    return oracle::wardrop_residual(p.net, p.ops, s.x, s.v).value <= cfg.tol;
  };
  const RunResult result = solver.run(SolverState::zeros(p.net), on_trace, accept);

  const io::Solution sol{result.state.x, result.state.xdual, result.state.v, result.residual,
                         result.iterations, result.termination};
  if (opt.out.empty()) {
    io::write_solution(std::cout, p.net, sol);
  } else {
    std::ofstream out(opt.out);
    if (!out) throw ConfigError("cannot write solution file '" + opt.out + "'");
    io::write_solution(out, p.net, sol);
  }

  if (!opt.quiet) {
    std::cerr << to_string(result.termination) << " after " << result.iterations
              << " iterations, residual " << io::format_number(result.residual);
    if (!result.message.empty()) std::cerr << " (" << result.message << ")";
    std::cerr << '\n';
  }
  switch (result.termination) {
    case Termination::Converged:
      return kExitOk;
    case Termination::IterLimit:
      return kExitIterLimit;
    case Termination::NumericalFailure:
      return kExitNumerical;
  }
  return kExitNumerical;
}

int run_check(const CheckOptions& opt) {
  const io::ParsedProblem p = io::parse_problem_file(opt.problem);
  print_warnings(p);
  const io::Solution sol = io::parse_solution_file(opt.solution, p.net);
  const double tol = opt.tol.value_or(p.cfg.tol);
  const auto report = oracle::wardrop_residual(p.net, p.ops, sol.x, sol.v);
  std::cout << "wardrop_residual " << io::format_number(report.value) << '\n';
  if (!report.diagnostic.empty()) std::cerr << report.diagnostic << '\n';
  if (report.value <= tol) {
    std::cout << "ok (tolerance " << io::format_number(tol) << ")\n";
    return kExitOk;
  }
  std::cout << "above tolerance " << io::format_number(tol) << '\n';
  return kExitIterLimit;
}

int run_selftest() {
  bool all = true;
  for (const auto& o : selftest::run_all()) {
    std::cout << (o.passed ? "PASS " : "FAIL ") << o.name << ": " << o.detail << '\n';
    all = all && o.passed;
  }
  return all ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multicommodity network equilibrium solver"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("problem", solve.problem, "Problem file")->required();
  solve_cmd->add_option("--out,-o", solve.out, "Solution file (default: standard output)");
  solve_cmd->add_option("--trace", solve.trace, "Per-iteration CSV trace");
  solve_cmd->add_option("--tol", solve.tol, "Residual tolerance");
  solve_cmd->add_option("--max-iter", solve.max_iter, "Iteration limit");
  solve_cmd->add_option("--scheduler", solve.scheduler, "full | roundrobin:K | randomsweep:p");
  solve_cmd->add_option("--sweep-bound,-T", solve.sweep_bound, "Sweeping window minus one");
  solve_cmd->add_option("--seed", solve.seed, "Seed for randomsweep");
  solve_cmd->add_option("--threads", solve.threads, "OpenMP threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_flag("--trace-timing", solve.trace_timing, "Fill the millis trace column");
  solve_cmd->add_flag("--quiet,-q", solve.quiet, "No summary on standard error");

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Recompute the equilibrium residual of a solution");
  check_cmd->add_option("problem", check.problem, "Problem file")->required();
  check_cmd->add_option("solution", check.solution, "Solution file")->required();
  check_cmd->add_option("--tol", check.tol, "Tolerance (default: the problem's tol)");

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the built-in property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*check_cmd) return run_check(check);
    if (*selftest_cmd) return run_selftest();
  } catch (const io::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInput;
}
