#include <gtest/gtest.h>

#include "netequil/errors.hpp"
#include "netequil/network.hpp"
#include "netequil/scheduler.hpp"

using namespace netequil;

namespace {

Network chain(std::size_t nodes) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < nodes; ++i) ids.push_back("n" + std::to_string(i));
  std::vector<Network::ArcEndpoints> arcs;
  for (std::size_t i = 0; i + 1 < nodes; ++i) arcs.push_back({"e" + std::to_string(i), ids[i], ids[i + 1]});
  arcs.push_back({"back", ids.back(), ids.front()});
  return Network(ids, arcs, {"c"});
}

// Counts blocks missing from some window n..n+T of the first `horizon` selections.
std::size_t sweep_violations(const SchedulerSpec& spec, std::size_t T, const Network& net,
                             std::size_t horizon) {
  BlockScheduler sched(spec, T, net.num_arcs(), net.num_nodes());
  std::vector<BlockSelection> sel;
  for (std::size_t n = 0; n < horizon; ++n) sel.push_back(sched.next());
  std::size_t violations = 0;
  for (std::size_t n = 0; n + T < horizon; ++n) {
    std::vector<bool> arcs(net.num_arcs(), false), nodes(net.num_nodes(), false);
    for (std::size_t k = n; k <= n + T; ++k) {
      for (auto j : sel[k].arcs) arcs[j] = true;
      for (auto i : sel[k].nodes) nodes[i] = true;
    }
    violations += std::count(arcs.begin(), arcs.end(), false) + std::count(nodes.begin(), nodes.end(), false);
  }
  return violations;
}

}  // namespace

TEST(Scheduler, FullSelectsEverything) {
  const Network net = chain(5);
  BlockScheduler sched(FullSweep{}, 0, net.num_arcs(), net.num_nodes());
  for (int n = 0; n < 10; ++n) {
    const auto sel = sched.next();
    EXPECT_EQ(sel.arcs.size(), net.num_arcs());
    EXPECT_EQ(sel.nodes.size(), net.num_nodes());
  }
}

TEST(Scheduler, RoundRobinAlternates) {
  const Network net = chain(4);  // 4 arcs, 4 nodes
  const auto rr = RoundRobin::interleaved(net, 2);
  BlockScheduler sched(rr, 1, net.num_arcs(), net.num_nodes());
  EXPECT_EQ(sched.next().arcs.size(), 4u);  // n = 0 is full
  for (std::size_t n = 1; n <= 10; ++n) {
    const auto sel = sched.next();
    EXPECT_EQ(sel.arcs, rr.arc_groups[n % 2]);
    EXPECT_EQ(sel.nodes, rr.node_groups[n % 2]);
  }
  EXPECT_EQ(sweep_violations(rr, 1, net, 12), 0u);
}

TEST(Scheduler, RandomSweepWithZeroProbabilityIsForced) {
  const Network net = chain(6);
  const RandomSweep rs{99, 0.0};
  EXPECT_EQ(sweep_violations(rs, 3, net, 100), 0u);
  BlockScheduler sched(rs, 3, net.num_arcs(), net.num_nodes());
  sched.next();
  for (int n = 1; n < 50; ++n) {
    const auto sel = sched.next();
    EXPECT_FALSE(sel.arcs.empty());
    EXPECT_FALSE(sel.nodes.empty());
  }
}

TEST(Scheduler, RandomSweepIsReproducible) {
  const Network net = chain(8);
  for (double p : {0.1, 0.5, 0.9}) {
    BlockScheduler a(RandomSweep{7, p}, 2, net.num_arcs(), net.num_nodes());
    BlockScheduler b(RandomSweep{7, p}, 2, net.num_arcs(), net.num_nodes());
    for (int n = 0; n < 200; ++n) {
      const auto sa = a.next(), sb = b.next();
      EXPECT_EQ(sa.arcs, sb.arcs);
      EXPECT_EQ(sa.nodes, sb.nodes);
      EXPECT_TRUE(std::is_sorted(sa.arcs.begin(), sa.arcs.end()));
    }
    EXPECT_EQ(sweep_violations(RandomSweep{7, p}, 2, net, 1000), 0u);
  }
}

TEST(Scheduler, SelectBlocksReplays) {
  const Network net = chain(5);
  const RandomSweep rs{3, 0.4};
  BlockScheduler sched(rs, 2, net.num_arcs(), net.num_nodes());
  for (std::size_t n = 0; n < 20; ++n) {
    const auto sel = sched.next();
    EXPECT_EQ(select_blocks(rs, 2, net.num_arcs(), net.num_nodes(), n).arcs, sel.arcs);
  }
}

TEST(Scheduler, RejectsSchedulesThatCannotSweep) {
  const Network net = chain(6);
  EXPECT_THROW(validate_scheduler(RoundRobin::interleaved(net, 3), 1, net), ConfigError);
  EXPECT_NO_THROW(validate_scheduler(RoundRobin::interleaved(net, 3), 2, net));
  RoundRobin gap = RoundRobin::interleaved(net, 2);
  gap.node_groups[0].erase(gap.node_groups[0].begin());
  EXPECT_THROW(validate_scheduler(gap, 1, net), ConfigError);
  RoundRobin out_of_range = RoundRobin::interleaved(net, 2);
  out_of_range.arc_groups[0].push_back(99);
  EXPECT_THROW(validate_scheduler(out_of_range, 1, net), ConfigError);
  EXPECT_THROW(validate_scheduler(RandomSweep{1, -0.1}, 3, net), ConfigError);
  EXPECT_THROW(RoundRobin::interleaved(net, 0), ConfigError);
  EXPECT_THROW(RoundRobin::interleaved(net, 50), ConfigError);
}
