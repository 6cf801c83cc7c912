#pragma once

// Reference solutions and equilibrium checks, written independently of the
// solver's resolvent path. Everything here evaluates the capacity functions
// directly instead of inverting them.

#include <cstddef>
#include <string>
#include <vector>

#include "netequil/network.hpp"
#include "netequil/operators.hpp"

namespace netequil::oracle {

/// Closed interval [lo, hi] (possibly unbounded); empty when lo > hi.
struct Interval {
  double lo;
  double hi;

  bool empty() const { return lo > hi; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// The set c(xi) for a scalar capacity. Single-valued families give [v, v];
/// points outside the domain give an empty interval.
Interval capacity_values(const ScalarCapacity& c, double xi);

/// Convenience for single-valued families; NaN outside the domain.
double capacity_value(const ScalarCapacity& c, double xi);

/// Two parallel arcs a -> b carrying demand d of one commodity with affine
/// costs a_j + b_j xi.
struct TwoArcInstance {
  double a1 = 1.0;
  double b1 = 1.0;
  double a2 = 2.0;
  double b2 = 1.0;
  double demand = 3.0;

  /// Throws ConfigError unless a_j >= 0, b_j > 0, demand > 0.
  void validate() const;
};

struct TwoArcSolution {
  double x1;
  double x2;
  /// Common cost of the used arcs (the smaller one at a corner).
  double cost;
  /// v_b - v_a at equilibrium; equals cost.
  double potential_gap;
  bool corner;
};

/// Unique Wardrop split of the demand between the two arcs.
TwoArcSolution analytic_two_arc(const TwoArcInstance& inst);

struct Problem {
  Network net;
  OperatorSet ops;
};

/// The instance as a network problem: BPR with p = 1 (theta = a_j,
/// alpha = b_j / a_j, rho = 1), nonnegative orthant, supplies +d / -d.
/// Requires a_j > 0.
Problem make_two_arc_problem(const TwoArcInstance& inst);

/// Braess diamond s -> {a, b} -> t with the cross arc a -> b, single
/// commodity, affine costs realised as BPR with p = 1:
///   sa: 1 + 2 xi, at: 5 + xi / 2, sb: 5 + xi / 2, bt: 1 + 2 xi, ab: 1 + xi / 2.
/// Arcs are ordered sa, sb, ab, at, bt; supplies +demand at s, -demand at t.
Problem make_braess_problem(double demand = 3.0);

/// Approximate Wardrop equilibrium by Frank-Wolfe with step 2/(k+2).
///
/// Single commodity; `costs` holds one BPR function per arc and `supply` one
/// value per node. Supplies must have a single origin (one positive entry) or
/// a single destination (one negative entry). Throws DomainError when a
/// destination cannot be reached and ConfigError for unsupported supplies.
Flow frank_wolfe_reference(const Network& net, const std::vector<Bpr>& costs,
                           const std::vector<double>& supply, std::size_t iterations);

struct WardropReport {
  double value = 0.0;
  /// Non-empty when value is +infinity: names the offending arc.
  std::string diagnostic;
};

/// Largest violation of the equilibrium inclusions over arcs and nodes.
///
/// Arc j contributes max(dist(x_j, C_j), dist((P x_j, Delta_j v - c 1), gra N_{C_j}))
/// with P the projection onto C_j, minimising over c in c(sum x_j); node i
/// contributes ||div_i x - s_i||. Measuring against the graph of the normal
/// cone keeps the value continuous when a flow sits just off a bound.
/// A flow whose total lies outside dom c yields +infinity.
WardropReport wardrop_residual(const Network& net, const OperatorSet& ops, const Flow& x,
                               const Potential& v);

}  // namespace netequil::oracle
