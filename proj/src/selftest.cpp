#include "netequil/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "netequil/errors.hpp"
#include "netequil/lambert_w.hpp"
#include "netequil/network.hpp"
#include "netequil/operators.hpp"
#include "netequil/oracle.hpp"
#include "netequil/scheduler.hpp"
#include "netequil/solver.hpp"

namespace netequil::selftest {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Outcome outcome(std::string name, bool passed, const std::ostringstream& detail) {
  return Outcome{std::move(name), passed, detail.str()};
}

// Root of s + gamma c(s) = xi by bisection, using only forward evaluations.
double invert_by_bisection(const ScalarCapacity& c, double gamma, double xi, double lo, double hi) {
  auto f = [&](double s) { return s + gamma * oracle::capacity_value(c, s) - xi; };
  for (int it = 0; it < 400 && lo < hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Sample {
  ScalarCapacity cap;
  double gamma;
  double xi;
};

Sample draw(Rng& rng, int family) {
  const double gamma = log_uniform(rng, 1e-2, 10.0);
  switch (family) {
    case 0: {
      Bpr b{uniform(rng, 0.05, 2.0), uniform(rng, 0.5, 50.0), uniform(rng, 0.1, 10.0),
            uniform(rng, 1.0, 5.0)};
      return {b, gamma, uniform(rng, -50.0, 200.0)};
    }
    case 1: {
      Logarithmic l{uniform(rng, 0.5, 20.0), uniform(rng, 0.0, 5.0)};
      // Well-conditioned band around omega; closer in the answer is within
      // an ulp of the domain boundary.
      return {l, gamma, l.omega + gamma * uniform(rng, -30.0, 10.0)};
    }
    case 2: {
      Trc t{uniform(rng, 0.1, 5.0), uniform(rng, 0.01, 10.0), uniform(rng, 0.01, 5.0),
            uniform(rng, 0.5, 20.0)};
      return {t, gamma, uniform(rng, -50.0, 100.0)};
    }
    default: {
      PowerExp e{uniform(rng, 1.1, 4.0), uniform(rng, 0.1, 5.0), uniform(rng, 0.5, 3.0)};
      return {e, gamma, uniform(rng, -20.0, 20.0)};
    }
  }
}

double state_distance(const SolverState& a, const SolverState& b) {
  double acc = 0.0;
  auto add = [&](std::span<const double> x, std::span<const double> y) {
    for (std::size_t k = 0; k < x.size(); ++k) acc += (x[k] - y[k]) * (x[k] - y[k]);
  };
  add(a.x.flat(), b.x.flat());
  add(a.xdual.flat(), b.xdual.flat());
  add(a.v.flat(), b.v.flat());
  return std::sqrt(acc);
}

BlockSelection everything(const Network& net) {
  return select_blocks(FullSweep{}, 0, net.num_arcs(), net.num_nodes(), 0);
}

}  // namespace

Outcome resolvent_identity(std::uint64_t seed) {
  Rng rng(seed);
  static constexpr const char* kNames[] = {"bpr", "log", "trc", "powexp"};
  std::ostringstream detail;
  bool ok = true;
  for (int family = 0; family < 4; ++family) {
    double worst = 0.0;
    for (int draw_index = 0; draw_index < 1000; ++draw_index) {
      const Sample s = draw(rng, family);
      const double j = resolvent(s.cap, s.gamma, s.xi);
      const double err = std::abs(j + s.gamma * oracle::capacity_value(s.cap, j) - s.xi) /
                         std::max(1.0, std::abs(s.xi));
      if (!(err <= 1e-8)) ok = false;
      worst = std::max(worst, std::isnan(err) ? std::numeric_limits<double>::infinity() : err);
    }
    detail << kNames[family] << " worst " << worst << "; ";
  }

  // The TRC closed form against bracketing on the forward map. s + gamma c(s)
  // is increasing; bracket the root from the closed form's neighbourhood outwards.
  double trc_worst = 0.0;
  for (int draw_index = 0; draw_index < 1000; ++draw_index) {
    const Sample s = draw(rng, 2);
    const double j = resolvent(s.cap, s.gamma, s.xi);
    double lo = j - 1.0, hi = j + 1.0;
    auto f = [&](double v) { return v + s.gamma * oracle::capacity_value(s.cap, v) - s.xi; };
    while (f(lo) > 0) lo -= 2.0 * (hi - lo);
    while (f(hi) < 0) hi += 2.0 * (hi - lo);
    const double ref = invert_by_bisection(s.cap, s.gamma, s.xi, lo, hi);
    const double err = std::abs(j - ref) / std::max(1.0, std::abs(ref));
    trc_worst = std::max(trc_worst, err);
  }
  if (!(trc_worst <= 1e-10)) ok = false;
  detail << "trc vs bisection " << trc_worst;
  return outcome("resolvent identity", ok, detail);
}

Outcome lambert_w_accuracy() {
  const double branch = -std::exp(-1.0);
  double worst = 0.0;
  constexpr int kPoints = 4000;
  const double lo = std::log(1e-9);
  const double hi = std::log(1e6 - branch);
  for (int k = 0; k <= kPoints; ++k) {
    const double x = branch + std::exp(lo + (hi - lo) * k / kPoints);
    const double w = lambert_w(x);
    const double err = std::abs(w * std::exp(w) - x) / std::max(1.0, x);
    worst = std::max(worst, err);
  }
  const double w0 = lambert_w(0.0);
  const double we = lambert_w(std::exp(1.0));
  const bool ok = worst <= 1e-12 && std::abs(w0) <= 1e-15 && std::abs(we - 1.0) <= 1e-15;
  std::ostringstream detail;
  detail << "grid worst " << worst << "; W(0)=" << w0 << "; W(e)-1=" << we - 1.0;
  return outcome("lambert w", ok, detail);
}

Outcome separable_lift(std::uint64_t seed) {
  Rng rng(seed + 1);
  double sum_worst = 0.0;
  double diff_excess = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Sample s = draw(rng, trial % 4);
    const std::size_t dim = pick(rng, 1, 6);
    std::vector<double> x(dim), out(dim);
    // Spread the total around the sampled xi so every family sees its interesting range.
    for (auto& v : x) v = s.xi / static_cast<double>(dim) + uniform(rng, -5.0, 5.0);
    lift_resolvent(s.cap, s.gamma, x, out);

    double total_in = 0.0, total_out = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      total_in += x[k];
      total_out += out[k];
    }
    const double expect = resolvent(s.cap, static_cast<double>(dim) * s.gamma, total_in);
    sum_worst = std::max(sum_worst, std::abs(total_out - expect) / std::max(1.0, std::abs(expect)));

    // out_k = x_k + eta for one eta: any difference beyond the rounding of the
    // single addition per coordinate would break the structure.
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = a + 1; b < dim; ++b) {
        const double drift = std::abs((out[a] - out[b]) - (x[a] - x[b]));
        const double allowed = 0.5 * (std::abs(out[a]) + std::abs(out[b]) + std::abs(x[a]) +
                                      std::abs(x[b])) *
                               std::numeric_limits<double>::epsilon();
        diff_excess = std::max(diff_excess, drift - allowed);
      }
    }
  }
  std::ostringstream detail;
  detail << "sum worst " << sum_worst << "; difference excess over rounding " << diff_excess;
  return outcome("separable lift", sum_worst <= 1e-10 && diff_excess <= 0.0, detail);
}

Outcome adjointness(std::uint64_t seed) {
  Rng rng(seed + 2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nodes = pick(rng, 2, 20);
    const std::size_t arcs = pick(rng, 1, 60);
    const std::size_t dim = pick(rng, 1, 4);
    std::vector<std::string> node_ids, commodity_ids;
    for (std::size_t i = 0; i < nodes; ++i) node_ids.push_back("n" + std::to_string(i));
    for (std::size_t k = 0; k < dim; ++k) commodity_ids.push_back("c" + std::to_string(k));
    std::vector<Network::ArcEndpoints> ends;
    for (std::size_t j = 0; j < arcs; ++j) {
      const std::size_t t = pick(rng, 0, nodes - 1);
      std::size_t h = pick(rng, 0, nodes - 2);
      if (h >= t) ++h;
      ends.push_back({"e" + std::to_string(j), node_ids[t], node_ids[h]});
    }
    const Network net(node_ids, ends, commodity_ids);
    Flow x = net.zero_flow();
    Potential v = net.zero_potential();
    for (auto& val : x.flat()) val = uniform(rng, -10.0, 10.0);
    for (auto& val : v.flat()) val = uniform(rng, -10.0, 10.0);

    const NodeVector div = divergence(net, x);
    const ArcVector ten = tension(net, v);
    double lhs = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        lhs += div[i][k] * v[i][k];
        scale += std::abs(div[i][k] * v[i][k]);
      }
    }
    for (std::size_t j = 0; j < arcs; ++j) {
      for (std::size_t k = 0; k < dim; ++k) {
        lhs += x[j][k] * ten[j][k];
        scale += std::abs(x[j][k] * ten[j][k]);
      }
    }
    worst = std::max(worst, std::abs(lhs) / std::max(scale, 1.0));
  }
  std::ostringstream detail;
  detail << "worst relative defect " << worst;
  return outcome("adjointness", worst <= 1e-12, detail);
}

Outcome two_arc_equilibrium() {
  const oracle::TwoArcInstance inst;
  const auto exact = oracle::analytic_two_arc(inst);
  const auto problem = oracle::make_two_arc_problem(inst);
  const Network& net = problem.net;

  struct Case {
    const char* name;
    SchedulerSpec spec;
    std::size_t sweep_bound;
  };
  const Case cases[] = {
      {"full", FullSweep{}, 0},
      {"roundrobin", RoundRobin::interleaved(net, 2), 1},
      {"randomsweep", RandomSweep{7, 0.5}, 3},
  };
  bool ok = true;
  std::ostringstream detail;
  for (const auto& c : cases) {
    SolverConfig cfg = SolverConfig::defaults(net);
    cfg.scheduler = c.spec;
    cfg.sweep_bound = c.sweep_bound;
    cfg.max_iter = 100000;
    cfg.check_interval = 1;
    cfg.keep_trace = false;
    const Solver solver(net, problem.ops, cfg);
    const RunResult r = solver.run(SolverState::zeros(net));
    const double dx = std::max(std::abs(r.state.x[0][0] - exact.x1), std::abs(r.state.x[1][0] - exact.x2));
    const double gap = r.state.v[1][0] - r.state.v[0][0];
    const bool pass = r.termination == Termination::Converged && r.residual <= 1e-6 && dx <= 1e-5 &&
                      std::abs(gap - exact.cost) <= 1e-5;
    ok = ok && pass;
    detail << c.name << ": " << r.iterations << " it, flow err " << dx << ", tension err "
           << std::abs(gap - exact.cost) << "; ";
  }
  return outcome("two-arc equilibrium", ok, detail);
}

Outcome braess_agreement() {
  const auto problem = oracle::make_braess_problem();
  const Network& net = problem.net;
  std::vector<Bpr> costs;
  for (const auto& op : problem.ops.arcs) costs.push_back(std::get<Bpr>(op.capacity));
  std::vector<double> supply;
  for (const auto& node : problem.ops.nodes) supply.push_back(node.supply[0]);
  const Flow reference = oracle::frank_wolfe_reference(net, costs, supply, 20000);

  SolverConfig cfg = SolverConfig::defaults(net);
  cfg.keep_trace = false;
  const Solver solver(net, problem.ops, cfg);
  const RunResult r = solver.run(SolverState::zeros(net));

  double worst = 0.0;
  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    worst = std::max(worst, std::abs(r.state.x[j][0] - reference[j][0]));
  }
  const auto wardrop = oracle::wardrop_residual(net, problem.ops, r.state.x, r.state.v);
  std::ostringstream detail;
  detail << r.iterations << " it; max flow gap to frank-wolfe " << worst << "; wardrop "
         << wardrop.value;
  return outcome("braess vs frank-wolfe", r.termination == Termination::Converged && worst <= 1e-3 &&
                                              wardrop.value <= 1e-5,
                 detail);
}

Outcome fejer_monotonicity() {
  const oracle::TwoArcInstance inst;
  const auto exact = oracle::analytic_two_arc(inst);
  const auto problem = oracle::make_two_arc_problem(inst);
  const Network& net = problem.net;

  // Interior equilibrium: x* = 0, v = (0, cost).
  SolverState solution = SolverState::zeros(net);
  solution.x[0][0] = exact.x1;
  solution.x[1][0] = exact.x2;
  solution.v[1][0] = exact.potential_gap;

  const SolverConfig cfg = SolverConfig::defaults(net);
  const Solver solver(net, problem.ops, cfg);
  bool verified = oracle::wardrop_residual(net, problem.ops, solution.x, solution.v).value <= 1e-12 &&
                  solver.residual(solution) <= 1e-12;

  SolverState state = SolverState::zeros(net);
  IterationWorkspace ws(net);
  const BlockSelection all = everything(net);
  double prev = state_distance(state, solution);
  double worst_increase = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  for (; iterations < 5000; ++iterations) {
    solver.step(state, ws, all);
    const double d = state_distance(state, solution);
    worst_increase = std::max(worst_increase, d - prev);
    prev = d;
    if (d <= 1e-13) break;
  }
  std::ostringstream detail;
  detail << (verified ? "" : "reference point failed verification; ") << iterations
         << " it; largest distance increase " << worst_increase << "; final distance " << prev;
  return outcome("fejer monotonicity", verified && worst_increase <= 1e-10, detail);
}

Outcome sweeping_enforcement(std::uint64_t seed) {
  // A 7-node, 12-arc ring-with-chords network exercises uneven group sizes.
  std::vector<std::string> nodes;
  for (int i = 0; i < 7; ++i) nodes.push_back("n" + std::to_string(i));
  std::vector<Network::ArcEndpoints> arcs;
  for (int j = 0; j < 12; ++j) {
    arcs.push_back({"e" + std::to_string(j), nodes[j % 7], nodes[(j % 7 + 1 + j / 7) % 7]});
  }
  const Network net(nodes, arcs, {"c"});

  struct Case {
    std::string name;
    SchedulerSpec spec;
    std::size_t sweep_bound;
  };
  std::vector<Case> cases = {
      {"full", FullSweep{}, 0},
      {"roundrobin2", RoundRobin::interleaved(net, 2), 1},
      {"roundrobin3", RoundRobin::interleaved(net, 3), 4},
      {"random0", RandomSweep{seed, 0.0}, 3},
      {"random0.3", RandomSweep{seed + 1, 0.3}, 2},
      {"random0.9", RandomSweep{seed + 2, 0.9}, 0},
  };

  bool ok = true;
  std::ostringstream detail;
  constexpr std::size_t kIterations = 1000;
  for (const auto& c : cases) {
    validate_scheduler(c.spec, c.sweep_bound, net);
    BlockScheduler sched(c.spec, c.sweep_bound, net.num_arcs(), net.num_nodes());
    std::vector<std::size_t> arc_last(net.num_arcs(), 0), node_last(net.num_nodes(), 0);
    std::size_t violations = 0;
    for (std::size_t n = 0; n < kIterations; ++n) {
      const BlockSelection sel = sched.next();
      if (n == 0 && (sel.arcs.size() != net.num_arcs() || sel.nodes.size() != net.num_nodes())) ++violations;
      if (sel.arcs.empty() || sel.nodes.empty()) ++violations;
      for (auto j : sel.arcs) arc_last[j] = n;
      for (auto i : sel.nodes) node_last[i] = n;
      // Every block must have been active somewhere in n - T .. n.
      if (n >= c.sweep_bound) {
        for (auto last : arc_last) violations += last + c.sweep_bound < n ? 1 : 0;
        for (auto last : node_last) violations += last + c.sweep_bound < n ? 1 : 0;
      }
    }
    ok = ok && violations == 0;
    detail << c.name << " " << violations << " violations; ";
  }

  // Schedulers that cannot sweep in time must be refused up front.
  auto rejected = [&](const SchedulerSpec& spec, std::size_t sweep_bound) {
    try {
      validate_scheduler(spec, sweep_bound, net);
    } catch (const ConfigError&) {
      return true;
    }
    return false;
  };
  RoundRobin missing = RoundRobin::interleaved(net, 2);
  missing.arc_groups[1].pop_back();
  RoundRobin empty_group = RoundRobin::interleaved(net, 2);
  empty_group.node_groups.push_back({});
  empty_group.arc_groups.push_back({});
  const bool broken_rejected = rejected(RoundRobin::interleaved(net, 3), 1) && rejected(missing, 1) &&
                               rejected(empty_group, 2) && rejected(RandomSweep{seed, 1.5}, 1);
  detail << (broken_rejected ? "broken schedulers rejected" : "a broken scheduler was accepted");
  return outcome("sweeping enforcement", ok && broken_rejected, detail);
}

Outcome degenerate_branches() {
  std::ostringstream detail;
  bool ok = true;

  // tau = 0: zero data, zero state; every block quantity vanishes.
  {
    const Network net({"a", "b"}, {{"e", "a", "b"}}, {"c1", "c2"});
    OperatorSet ops;
    ops.arcs.push_back({IntervalProx{PhiZero{}, 0.0, 10.0}, Box::orthant(2)});
    ops.nodes.assign(2, NodeOperator{{0.0, 0.0}});
    const Solver solver(net, ops, SolverConfig::defaults(net));
    SolverState state = SolverState::zeros(net);
    const SolverState before = state;
    IterationWorkspace ws(net);
    const TraceRecord rec = solver.step(state, ws, everything(net));
    const bool pass = rec.tau == 0.0 && rec.theta == 0.0 && state.x == before.x &&
                      state.xdual == before.xdual && state.v == before.v;
    ok = ok && pass;
    detail << "tau=0 branch " << (pass ? "unchanged" : "moved") << "; ";
  }

  // pi <= 0 < tau: nothing active, stale caches chosen so that pi < 0.
  {
    const Network net({"a", "b"}, {{"e", "a", "b"}}, {"c"});
    OperatorSet ops;
    ops.arcs.push_back({Bpr{1.0, 1.0, 1.0, 1.0}, Box::orthant(1)});
    ops.nodes = {{{1.0}}, {{-1.0}}};
    const Solver solver(net, ops, SolverConfig::defaults(net));
    SolverState state = SolverState::zeros(net);
    state.n = 5;
    IterationWorkspace ws(net);
    ws.q[0][0] = 1.0;
    ws.qdual[0][0] = 1.0;
    ws.r[0][0] = 2.0;
    ws.rdual[0][0] = 1.0;
    const SolverState before = state;
    const TraceRecord rec = solver.step(state, ws, BlockSelection{});
    const bool pass = rec.tau > 0.0 && rec.pi <= 0.0 && rec.theta == 0.0 && state.x == before.x &&
                      state.xdual == before.xdual && state.v == before.v;
    ok = ok && pass;
    detail << "pi<=0 branch tau " << rec.tau << " pi " << rec.pi << " " << (pass ? "unchanged" : "moved");
  }
  return outcome("degenerate branches", ok, detail);
}

std::vector<Outcome> run_all(std::uint64_t seed) {
  return {resolvent_identity(seed), lambert_w_accuracy(),     separable_lift(seed),
          adjointness(seed),        two_arc_equilibrium(),    braess_agreement(),
          fejer_monotonicity(),     sweeping_enforcement(seed), degenerate_branches()};
}

}  // namespace netequil::selftest
