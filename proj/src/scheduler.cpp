#include "netequil/scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "netequil/errors.hpp"
#include "netequil/network.hpp"

namespace netequil {

namespace {

std::vector<std::size_t> iota_vector(std::size_t count) {
  std::vector<std::size_t> v(count);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void validate_groups(const std::vector<std::vector<std::size_t>>& groups, std::size_t count,
                     std::size_t sweep_bound, const char* what) {
  if (groups.empty()) throw ConfigError(std::string("roundrobin: no ") + what + " groups");
  if (groups.size() > sweep_bound + 1) {
    throw ConfigError(std::string("roundrobin: ") + std::to_string(groups.size()) + " " + what +
                      " groups cannot be swept within T+1 = " + std::to_string(sweep_bound + 1) +
                      " iterations");
  }
  std::vector<bool> covered(count, false);
  for (const auto& g : groups) {
    if (g.empty()) throw ConfigError(std::string("roundrobin: empty ") + what + " group");
    for (std::size_t idx : g) {
      if (idx >= count) {
        throw ConfigError(std::string("roundrobin: ") + what + " index " + std::to_string(idx) +
                          " out of range");
      }
      covered[idx] = true;
    }
  }
  if (!std::all_of(covered.begin(), covered.end(), [](bool b) { return b; })) {
    throw ConfigError(std::string("roundrobin: ") + what + " groups do not cover every " + what);
  }
}

// splitmix64
std::uint64_t next_random(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::vector<std::size_t>> interleave(std::size_t count, std::size_t groups) {
  std::vector<std::vector<std::size_t>> out(groups);
  for (std::size_t k = 0; k < count; ++k) out[k % groups].push_back(k);
  return out;
}

}  // namespace

RoundRobin RoundRobin::interleaved(const Network& net, std::size_t groups) {
  if (groups == 0) throw ConfigError("roundrobin: group count must be positive");
  if (groups > net.num_arcs() || groups > net.num_nodes()) {
    throw ConfigError("roundrobin: " + std::to_string(groups) +
                      " groups exceed the number of arcs or nodes");
  }
  return RoundRobin{interleave(net.num_arcs(), groups), interleave(net.num_nodes(), groups)};
}

void validate_scheduler(const SchedulerSpec& spec, std::size_t sweep_bound, const Network& net) {
  if (const auto* rr = std::get_if<RoundRobin>(&spec)) {
    validate_groups(rr->arc_groups, net.num_arcs(), sweep_bound, "arc");
    validate_groups(rr->node_groups, net.num_nodes(), sweep_bound, "node");
  } else if (const auto* rs = std::get_if<RandomSweep>(&spec)) {
    if (!(rs->activation_prob >= 0.0 && rs->activation_prob <= 1.0)) {
      throw ConfigError("randomsweep: activation probability must lie in [0, 1]");
    }
  }
}

BlockScheduler::BlockScheduler(SchedulerSpec spec, std::size_t sweep_bound, std::size_t num_arcs,
                               std::size_t num_nodes)
    : spec_(std::move(spec)),
      sweep_bound_(sweep_bound),
      num_arcs_(num_arcs),
      num_nodes_(num_nodes),
      arc_last_(num_arcs, 0),
      node_last_(num_nodes, 0) {
  if (const auto* rs = std::get_if<RandomSweep>(&spec_)) rng_state_ = rs->seed;
}

double BlockScheduler::uniform() {
  return static_cast<double>(next_random(rng_state_) >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> BlockScheduler::random_subset(std::vector<std::size_t>& last_active,
                                                       std::size_t count) {
  const double prob = std::get<RandomSweep>(spec_).activation_prob;
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < count; ++k) {
    // Draw for every block so the stream does not depend on forced choices.
    const bool drawn = uniform() < prob;
    const bool overdue = n_ - last_active[k] > sweep_bound_;
    if (drawn || overdue) active.push_back(k);
  }
  if (active.empty()) {
    // Longest idle block, lowest index on ties.
    auto oldest = std::min_element(last_active.begin(), last_active.end());
    active.push_back(static_cast<std::size_t>(oldest - last_active.begin()));
  }
  for (std::size_t k : active) last_active[k] = n_;
  return active;
}

BlockSelection BlockScheduler::next() {
  BlockSelection sel;
  if (n_ == 0 || std::holds_alternative<FullSweep>(spec_)) {
    sel.arcs = iota_vector(num_arcs_);
    sel.nodes = iota_vector(num_nodes_);
    if (n_ == 0 && std::holds_alternative<RandomSweep>(spec_)) {
      // Keep the random stream aligned with later iterations.
      for (std::size_t k = 0; k < num_arcs_ + num_nodes_; ++k) uniform();
    }
  } else if (const auto* rr = std::get_if<RoundRobin>(&spec_)) {
    sel.arcs = rr->arc_groups[n_ % rr->arc_groups.size()];
    sel.nodes = rr->node_groups[n_ % rr->node_groups.size()];
    std::sort(sel.arcs.begin(), sel.arcs.end());
    std::sort(sel.nodes.begin(), sel.nodes.end());
  } else {
    sel.arcs = random_subset(arc_last_, num_arcs_);
    sel.nodes = random_subset(node_last_, num_nodes_);
  }
  ++n_;
  return sel;
}

BlockSelection select_blocks(const SchedulerSpec& spec, std::size_t sweep_bound,
                             std::size_t num_arcs, std::size_t num_nodes, std::size_t n) {
  BlockScheduler sched(spec, sweep_bound, num_arcs, num_nodes);
  for (std::size_t k = 0; k < n; ++k) sched.next();
  return sched.next();
}

}  // namespace netequil
