#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netequil/network.hpp"
#include "netequil/operators.hpp"
#include "netequil/scheduler.hpp"

namespace netequil {

/// Relaxation parameters lambda_n, repeated cyclically.
struct RelaxationSchedule {
  std::vector<double> values{1.8};

  double at(std::size_t n) const { return values[n % values.size()]; }
  bool operator==(const RelaxationSchedule&) const = default;
};

enum class Execution {
  /// Straight transcription of the iteration, one block at a time.
  Reference,
  /// OpenMP over arc and node blocks. Bitwise identical to Reference.
  Parallel,
};

struct SolverConfig {
  std::vector<double> gamma;  // per arc
  std::vector<double> mu;     // per arc
  std::vector<double> sigma;  // per node
  RelaxationSchedule lambda;
  std::size_t sweep_bound = 0;
  SchedulerSpec scheduler = FullSweep{};
  double tol = 1e-6;
  std::size_t max_iter = 1'000'000;
  std::size_t check_interval = 10;
  Execution execution = Execution::Reference;
  /// OpenMP team size for Execution::Parallel; 0 lets the runtime decide.
  int threads = 0;
  /// Fill TraceRecord::millis. Off by default so traces are reproducible.
  bool record_timing = false;
  /// Keep every TraceRecord in RunResult::trace (the callback sees them regardless).
  bool keep_trace = true;

  /// Unit steps, lambda = 1.8, full sweep.
  static SolverConfig defaults(const Network& net);
  bool operator==(const SolverConfig&) const = default;
};

/// Throws ConfigError on non-positive steps, lambda outside ]0,2[, zero check
/// interval, dimension mismatches, or a scheduler that breaks the sweep bound.
void validate(const SolverConfig& cfg, const Network& net);

struct SolverState {
  Flow x;
  ArcDual xdual;
  Potential v;
  std::size_t n = 0;

  static SolverState zeros(const Network& net);
  bool operator==(const SolverState&) const = default;
};

/// Block outputs cached across iterations plus per-iteration scratch.
struct IterationWorkspace {
  // Cached per arc; only rewritten when the arc is active.
  ArcVector q, qdual, r, rdual;
  // Cached per node; only rewritten when the node is active.
  NodeVector s, sdual;
  // Recomputed for every block every iteration.
  ArcVector ldual, tdual, u, x_minus_q;
  NodeVector l, t, div_x, div_xq;
  // Per-block contributions to tau and pi, summed in index order.
  std::vector<double> arc_tau, arc_pi, node_tau, node_pi;
  double tau = 0.0;
  double pi = 0.0;
  double theta = 0.0;

  explicit IterationWorkspace(const Network& net);
};

struct TraceRecord {
  std::size_t n = 0;
  double tau = 0.0;
  double pi = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  std::size_t active_arcs = 0;
  std::size_t active_nodes = 0;
  std::optional<double> residual;
  std::optional<double> millis;

  bool operator==(const TraceRecord&) const = default;
};

enum class Termination { Converged, IterLimit, NumericalFailure };

std::string_view to_string(Termination t);

struct RunResult {
  SolverState state;
  std::vector<TraceRecord> trace;
  Termination termination = Termination::IterLimit;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::string message;
};

using TraceCallback = std::function<void(const TraceRecord&)>;
/// Extra acceptance test consulted once the residual is below tolerance.
using AcceptCallback = std::function<bool(const SolverState&)>;

/// Block-iterative primal-dual splitting for the network equilibrium inclusion.
///
/// Each iteration evaluates the resolvents of Q_j, R_j (active arcs) and S_i
/// (active nodes), builds the separating half-space from (tau, pi), and moves
/// (x, x*, v*) onto it with relaxation lambda_n.
class Solver {
 public:
  Solver(const Network& net, const OperatorSet& ops, SolverConfig cfg);

  const Network& network() const { return net_; }
  const OperatorSet& operators() const { return ops_; }
  const SolverConfig& config() const { return cfg_; }

  /// One iteration with the given active blocks. state.n selects lambda_n and
  /// is incremented. Throws NumericalFailure on non-finite tau or pi.
  TraceRecord step(SolverState& state, IterationWorkspace& ws, const BlockSelection& active) const;

  /// Full-activation residual at the current point; zero exactly at solutions.
  double residual(const SolverState& state) const;

  RunResult run(SolverState initial, const TraceCallback& on_trace = {},
                const AcceptCallback& accept = {}) const;

 private:
  const Network& net_;
  const OperatorSet& ops_;
  SolverConfig cfg_;
};

}  // namespace netequil
