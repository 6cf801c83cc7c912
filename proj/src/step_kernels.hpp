#pragma once

#include <span>
#include <vector>

#include "netequil/solver.hpp"

namespace netequil::detail {

// Both variants fill every IterationWorkspace quantity for the given selection
// (cached blocks for active arcs/nodes, t, t*, u, tau and pi for all) without
// touching the state. They must agree bitwise: same per-block arithmetic, and
// every sum taken in ascending index order.

void evaluate_reference(const Network& net, const OperatorSet& ops, const SolverConfig& cfg,
                        const SolverState& state, IterationWorkspace& ws,
                        const BlockSelection& active);

void evaluate_parallel(const Network& net, const OperatorSet& ops, const SolverConfig& cfg,
                       const SolverState& state, IterationWorkspace& ws,
                       const BlockSelection& active);

/// x -= theta t*, x* -= theta u, v* -= theta t.
void update_reference(SolverState& state, const IterationWorkspace& ws, double theta);
void update_parallel(SolverState& state, const IterationWorkspace& ws, double theta, int threads);

// The coordination scalar pi, regrouped so that every product has a factor
// that vanishes at a solution. Summed over all blocks this equals
//   sum_j <x, t*> - <q, q*> + <u, x*> - <r, r*>  +  sum_i <t, v*> - <s, s*>
// (the divergence and tension are adjoint). With d = x - q and e = div x - s,
// t = div d - e, and the only O(1) factors left are v and q* + x*, which
// multiply the same rounded d on the arc and node side.
inline double arc_pi_term(std::span<const double> x, std::span<const double> xd,
                          std::span<const double> d, std::span<const double> qd,
                          std::span<const double> r, std::span<const double> rd) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += d[k] * (qd[k] + xd[k]) + (x[k] - r[k]) * (rd[k] - xd[k]);
  }
  return acc;
}

/// Fills t = div d - e and returns the node's share of pi.
inline double node_t_and_pi(std::span<const double> div_x, std::span<const double> div_d,
                            std::span<const double> s, std::span<const double> sd,
                            std::span<const double> v, std::span<double> t) {
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double e = div_x[k] - s[k];
    t[k] = div_d[k] - e;
    acc += e * (sd[k] - v[k]) + div_d[k] * v[k];
  }
  return acc;
}

inline double sum_in_order(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (double v : a) acc += v;
  for (double v : b) acc += v;
  return acc;
}

}  // namespace netequil::detail
