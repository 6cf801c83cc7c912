#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace netequil {

class Network;

/// Activates every arc and node at every iteration.
struct FullSweep {
  bool operator==(const FullSweep&) const = default;
};

/// Cycles through fixed groups; iteration n uses group n mod K (n = 0 is full).
struct RoundRobin {
  std::vector<std::vector<std::size_t>> arc_groups;
  std::vector<std::vector<std::size_t>> node_groups;

  /// Splits arcs and nodes into `groups` interleaved groups (index mod groups).
  static RoundRobin interleaved(const Network& net, std::size_t groups);
  bool operator==(const RoundRobin&) const = default;
};

/// Activates each block independently with the given probability, forcing any
/// block that has been idle for the last T iterations.
struct RandomSweep {
  std::uint64_t seed = 0;
  double activation_prob = 0.5;
  bool operator==(const RandomSweep&) const = default;
};

using SchedulerSpec = std::variant<FullSweep, RoundRobin, RandomSweep>;

/// Active arc and node indices for one iteration, each sorted ascending.
struct BlockSelection {
  std::vector<std::size_t> arcs;
  std::vector<std::size_t> nodes;
};

/// Throws ConfigError if the scheduler cannot guarantee that every block is
/// activated within any window of sweep_bound + 1 consecutive iterations.
void validate_scheduler(const SchedulerSpec& spec, std::size_t sweep_bound, const Network& net);

/// Produces A_n and N_n for n = 0, 1, 2, ... in order.
///
/// A_0 and N_0 are always the full sets, subsets are never empty, and every
/// block appears at least once in each window n..n+T.
class BlockScheduler {
 public:
  BlockScheduler(SchedulerSpec spec, std::size_t sweep_bound, std::size_t num_arcs,
                 std::size_t num_nodes);

  BlockSelection next();
  std::size_t iteration() const { return n_; }

 private:
  std::vector<std::size_t> random_subset(std::vector<std::size_t>& last_active, std::size_t count);
  double uniform();

  SchedulerSpec spec_;
  std::size_t sweep_bound_;
  std::size_t num_arcs_;
  std::size_t num_nodes_;
  std::size_t n_ = 0;
  std::uint64_t rng_state_ = 0;
  std::vector<std::size_t> arc_last_;
  std::vector<std::size_t> node_last_;
};

/// Convenience: the selection at iteration n, replaying the scheduler from 0.
BlockSelection select_blocks(const SchedulerSpec& spec, std::size_t sweep_bound,
                             std::size_t num_arcs, std::size_t num_nodes, std::size_t n);

}  // namespace netequil
