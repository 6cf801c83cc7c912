#include "netequil/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "netequil/errors.hpp"
#include "step_kernels.hpp"

namespace netequil {

namespace {

void check_steps(const std::vector<double>& steps, std::size_t expected, const char* what) {
  if (steps.size() != expected) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(expected) +
                      " values, got " + std::to_string(steps.size()));
  }
  for (double s : steps) {
    if (!(std::isfinite(s) && s > 0.0)) {
      throw ConfigError(std::string(what) + ": step parameters must be finite and positive");
    }
  }
}

BlockSelection full_selection(const Network& net) {
  BlockSelection sel;
  sel.arcs.resize(net.num_arcs());
  sel.nodes.resize(net.num_nodes());
  std::iota(sel.arcs.begin(), sel.arcs.end(), std::size_t{0});
  std::iota(sel.nodes.begin(), sel.nodes.end(), std::size_t{0});
  return sel;
}

}  // namespace

SolverConfig SolverConfig::defaults(const Network& net) {
  SolverConfig cfg;
  cfg.gamma.assign(net.num_arcs(), 1.0);
  cfg.mu.assign(net.num_arcs(), 1.0);
  cfg.sigma.assign(net.num_nodes(), 1.0);
  return cfg;
}

void validate(const SolverConfig& cfg, const Network& net) {
  check_steps(cfg.gamma, net.num_arcs(), "gamma");
  check_steps(cfg.mu, net.num_arcs(), "mu");
  check_steps(cfg.sigma, net.num_nodes(), "sigma");
  if (cfg.lambda.values.empty()) throw ConfigError("lambda: empty relaxation schedule");
  for (double l : cfg.lambda.values) {
    if (!(l > 0.0 && l < 2.0)) throw ConfigError("lambda: relaxation must lie in ]0, 2[");
  }
  if (!(cfg.tol >= 0.0)) throw ConfigError("tol: must be nonnegative");
  if (cfg.check_interval == 0) throw ConfigError("check_interval: must be positive");
  if (cfg.threads < 0) throw ConfigError("threads: must be nonnegative");
  validate_scheduler(cfg.scheduler, cfg.sweep_bound, net);
}

SolverState SolverState::zeros(const Network& net) {
  return SolverState{net.zero_flow(), net.zero_arc_dual(), net.zero_potential(), 0};
}

IterationWorkspace::IterationWorkspace(const Network& net)
    : q(net.zero_flow()),
      qdual(net.zero_flow()),
      r(net.zero_flow()),
      rdual(net.zero_flow()),
      s(net.zero_potential()),
      sdual(net.zero_potential()),
      ldual(net.zero_flow()),
      tdual(net.zero_flow()),
      u(net.zero_flow()),
      x_minus_q(net.zero_flow()),
      l(net.zero_potential()),
      t(net.zero_potential()),
      div_x(net.zero_potential()),
      div_xq(net.zero_potential()),
      arc_tau(net.num_arcs()),
      arc_pi(net.num_arcs()),
      node_tau(net.num_nodes()),
      node_pi(net.num_nodes()) {}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::IterLimit:
      return "iteration_limit";
    case Termination::NumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

Solver::Solver(const Network& net, const OperatorSet& ops, SolverConfig cfg)
    : net_(net), ops_(ops), cfg_(std::move(cfg)) {
  validate(ops_, net_);
  validate(cfg_, net_);
}

TraceRecord Solver::step(SolverState& state, IterationWorkspace& ws,
                         const BlockSelection& active) const {
  TraceRecord rec;
  rec.n = state.n;
  rec.lambda = cfg_.lambda.at(state.n);
  rec.active_arcs = active.arcs.size();
  rec.active_nodes = active.nodes.size();

  if (cfg_.execution == Execution::Parallel) {
    detail::evaluate_parallel(net_, ops_, cfg_, state, ws, active);
  } else {
    detail::evaluate_reference(net_, ops_, cfg_, state, ws, active);
  }
  if (!std::isfinite(ws.tau) || !std::isfinite(ws.pi)) {
    throw NumericalFailure("non-finite tau or pi", state.n);
  }

  ws.theta = ws.tau > 0.0 ? rec.lambda * std::max(ws.pi, 0.0) / ws.tau : 0.0;
  if (!std::isfinite(ws.theta)) throw NumericalFailure("non-finite step length", state.n);

  // Skipping the zero update keeps the state bitwise unchanged (x - 0*t can
  // flip the sign of a zero).
  if (ws.theta > 0.0) {
    if (cfg_.execution == Execution::Parallel) {
      detail::update_parallel(state, ws, ws.theta, cfg_.threads);
    } else {
      detail::update_reference(state, ws, ws.theta);
    }
  }

  rec.tau = ws.tau;
  rec.pi = ws.pi;
  rec.theta = ws.theta;
  ++state.n;
  return rec;
}

double Solver::residual(const SolverState& state) const {
  IterationWorkspace ws(net_);
  const auto all = full_selection(net_);
  if (cfg_.execution == Execution::Parallel) {
    detail::evaluate_parallel(net_, ops_, cfg_, state, ws, all);
  } else {
    detail::evaluate_reference(net_, ops_, cfg_, state, ws, all);
  }
  double acc = ws.tau;
  for (std::size_t j = 0; j < net_.num_arcs(); ++j) {
    for (std::size_t k = 0; k < net_.num_commodities(); ++k) {
      const double d = ws.q[j][k] - state.x[j][k];
      acc += d * d;
    }
  }
  // With every node active, l holds div x.
  for (std::size_t i = 0; i < net_.num_nodes(); ++i) {
    for (std::size_t k = 0; k < net_.num_commodities(); ++k) {
      const double d = ws.s[i][k] - ws.l[i][k];
      acc += d * d;
    }
  }
  if (!std::isfinite(acc)) throw NumericalFailure("non-finite residual", state.n);
  return std::sqrt(acc);
}

RunResult Solver::run(SolverState initial, const TraceCallback& on_trace,
                      const AcceptCallback& accept) const {
  RunResult result;
  result.state = std::move(initial);
  const auto start = std::chrono::steady_clock::now();

  auto converged = [&](double res) {
    result.residual = res;
    return res <= cfg_.tol && (!accept || accept(result.state));
  };

  try {
    if (converged(residual(result.state))) {
      result.termination = Termination::Converged;
      return result;
    }
    IterationWorkspace ws(net_);
    BlockScheduler scheduler(cfg_.scheduler, cfg_.sweep_bound, net_.num_arcs(), net_.num_nodes());
    // After T + 1 consecutive zero steps every cache has been refreshed at the
    // same point, so every later step is zero as well.
    std::size_t zero_steps = 0;
    while (true) {
      if (result.iterations >= cfg_.max_iter) {
        result.termination = Termination::IterLimit;
        return result;
      }
      TraceRecord rec = step(result.state, ws, scheduler.next());
      ++result.iterations;

      zero_steps = rec.theta > 0.0 ? 0 : zero_steps + 1;
      const bool stalled = zero_steps > cfg_.sweep_bound;

      bool done = false;
      // tau = 0 means every evaluated block is consistent; confirm globally.
      if (result.iterations % cfg_.check_interval == 0 || rec.tau == 0.0 || stalled) {
        const double res = residual(result.state);
        rec.residual = res;
        done = converged(res);
      }
      if (cfg_.record_timing) {
        rec.millis =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
      }
      if (on_trace) on_trace(rec);
      if (cfg_.keep_trace) result.trace.push_back(rec);
      if (done) {
        result.termination = Termination::Converged;
        return result;
      }
      if (stalled) {
        // pi is below its rounding error: the tolerance is finer than the
        // precision this instance allows.
        char buf[96];
        std::snprintf(buf, sizeof buf, "iteration stalled at residual %.3g above tolerance %.3g",
                      result.residual, cfg_.tol);
        throw NumericalFailure(buf, rec.n);
      }
    }
  } catch (const NumericalFailure& e) {
    result.termination = Termination::NumericalFailure;
    result.message = e.what();
  }
  return result;
}

}  // namespace netequil
