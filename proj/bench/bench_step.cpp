// Serial reference vs OpenMP kernel on random multicommodity grids.

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "netequil/scheduler.hpp"
#include "netequil/solver.hpp"

namespace {

using namespace netequil;

struct Instance {
  Network net;
  OperatorSet ops;
};

// side x side grid with arcs in both directions, BPR costs, one
// origin-destination pair per commodity.
Instance make_grid(std::size_t side, std::size_t commodities) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  std::vector<std::string> nodes, names;
  for (std::size_t i = 0; i < side * side; ++i) nodes.push_back("n" + std::to_string(i));
  for (std::size_t k = 0; k < commodities; ++k) names.push_back("c" + std::to_string(k));
  std::vector<Network::ArcEndpoints> arcs;
  auto link = [&](std::size_t a, std::size_t b) {
    arcs.push_back({"e" + std::to_string(arcs.size()), nodes[a], nodes[b]});
    arcs.push_back({"e" + std::to_string(arcs.size()), nodes[b], nodes[a]});
  };
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t i = r * side + c;
      if (c + 1 < side) link(i, i + 1);
      if (r + 1 < side) link(i, i + side);
    }
  }
  Network net(nodes, arcs, names);
  OperatorSet ops;
  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    ops.arcs.push_back({Bpr{0.15, 10.0 * unit(rng), unit(rng), 4.0}, Box::orthant(commodities)});
  }
  ops.nodes.assign(net.num_nodes(), NodeOperator{std::vector<double>(commodities, 0.0)});
  std::uniform_int_distribution<std::size_t> pick(0, net.num_nodes() - 1);
  for (std::size_t k = 0; k < commodities; ++k) {
    const std::size_t o = pick(rng);
    std::size_t d = pick(rng);
    if (d == o) d = (o + 1) % net.num_nodes();
    ops.nodes[o].supply[k] = 5.0;
    ops.nodes[d].supply[k] = -5.0;
  }
  return {std::move(net), std::move(ops)};
}

void run_steps(benchmark::State& bstate, Execution execution) {
  const auto side = static_cast<std::size_t>(bstate.range(0));
  const auto commodities = static_cast<std::size_t>(bstate.range(1));
  const Instance inst = make_grid(side, commodities);
  SolverConfig cfg = SolverConfig::defaults(inst.net);
  cfg.execution = execution;
  const Solver solver(inst.net, inst.ops, cfg);
  SolverState state = SolverState::zeros(inst.net);
  IterationWorkspace ws(inst.net);
  const BlockSelection all =
      select_blocks(FullSweep{}, 0, inst.net.num_arcs(), inst.net.num_nodes(), 0);
  for (auto _ : bstate) {
    benchmark::DoNotOptimize(solver.step(state, ws, all));
  }
  bstate.counters["arcs"] = static_cast<double>(inst.net.num_arcs());
  bstate.SetItemsProcessed(bstate.iterations() * static_cast<std::int64_t>(inst.net.num_arcs()));
}

void BM_StepReference(benchmark::State& s) { run_steps(s, Execution::Reference); }
void BM_StepParallel(benchmark::State& s) { run_steps(s, Execution::Parallel); }

BENCHMARK(BM_StepReference)->Args({20, 4})->Args({60, 4})->Args({120, 8});
BENCHMARK(BM_StepParallel)->Args({20, 4})->Args({60, 4})->Args({120, 8});

}  // namespace

BENCHMARK_MAIN();
