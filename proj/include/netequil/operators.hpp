#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "netequil/errors.hpp"

namespace netequil {

class Network;

// Scalar capacity operators c: R -> 2^R. Each is only ever used through its
// resolvent J_{gamma c} = (Id + gamma c)^{-1}.

/// Bureau of Public Roads cost theta (1 + alpha (xi/rho)^p) for xi >= 0, theta below.
struct Bpr {
  double alpha = 0.15;
  double rho = 1.0;
  double theta = 1.0;
  double p = 4.0;
  bool operator==(const Bpr&) const = default;
};

/// theta + ln(omega / (omega - xi)) on xi < omega, empty beyond.
struct Logarithmic {
  double omega = 1.0;
  double theta = 0.0;
  bool operator==(const Logarithmic&) const = default;
};

/// Traffic Research Corporation cost delta + alpha(xi-omega) + sqrt(alpha^2 (xi-omega)^2 + beta).
struct Trc {
  double alpha = 1.0;
  double beta = 1.0;
  double delta = 1.0;
  double omega = 0.0;
  bool operator==(const Trc&) const = default;
};

/// theta alpha^(p xi) with alpha > 1.
struct PowerExp {
  double alpha = 2.0;
  double theta = 1.0;
  double p = 1.0;
  bool operator==(const PowerExp&) const = default;
};

// Convex functions phi with a closed-form prox, for IntervalProx.
struct PhiZero {
  bool operator==(const PhiZero&) const = default;
};
/// a xi + b
struct PhiAffine {
  double a = 0.0;
  double b = 0.0;
  bool operator==(const PhiAffine&) const = default;
};
/// a xi^2 / 2, a >= 0
struct PhiQuadratic {
  double a = 1.0;
  bool operator==(const PhiQuadratic&) const = default;
};
/// c |xi|^q with q in {1, 3/2, 2}, c >= 0
struct PhiPower {
  double c = 1.0;
  double q = 1.0;
  bool operator==(const PhiPower&) const = default;
};
using ScalarFunction = std::variant<PhiZero, PhiAffine, PhiQuadratic, PhiPower>;

/// Subdifferential of phi + indicator of [lo, hi].
struct IntervalProx {
  ScalarFunction phi = PhiZero{};
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const IntervalProx&) const = default;
};

using ScalarCapacity = std::variant<Bpr, Logarithmic, Trc, PowerExp, IntervalProx>;

/// Product of closed intervals, one per commodity.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box orthant(std::size_t dim);
  static Box whole_space(std::size_t dim);
  bool is_orthant() const;
  std::size_t dim() const { return lo.size(); }
  bool operator==(const Box&) const = default;
};

/// Q_j acts on the total flux through a scalar capacity; R_j is the normal
/// cone of a box.
struct ArcOperator {
  ScalarCapacity capacity;
  Box constraint;
  bool operator==(const ArcOperator&) const = default;
};

/// S_i with S_i^{-1} identically equal to {supply}.
struct NodeOperator {
  std::vector<double> supply;
  bool operator==(const NodeOperator&) const = default;
};

struct OperatorSet {
  std::vector<ArcOperator> arcs;
  std::vector<NodeOperator> nodes;
  bool operator==(const OperatorSet&) const = default;
};

/// Throws ConfigError when parameters violate the family's sign constraints.
void validate(const ScalarCapacity& c);
void validate(const Box& box);
/// Checks every operator and that dimensions agree with the network.
void validate(const OperatorSet& ops, const Network& net);

double resolvent_bpr(const Bpr& c, double gamma, double xi);
double resolvent_log(const Logarithmic& c, double gamma, double xi);
double resolvent_trc(const Trc& c, double gamma, double xi);
double resolvent_powerexp(const PowerExp& c, double gamma, double xi);
double prox(const ScalarFunction& phi, double gamma, double xi);
double resolvent_interval_prox(const IntervalProx& c, double gamma, double xi);

/// J_{gamma c}(xi), dispatched on the family.
double resolvent(const ScalarCapacity& c, double gamma, double xi);

/// Resolvent of x -> (c(sum_k x_k))_k: every coordinate is shifted by
/// (J_{N gamma c}(sum x) - sum x) / N.
void lift_resolvent(const ScalarCapacity& c, double gamma, std::span<const double> x,
                    std::span<double> out);

void project_box(const Box& box, std::span<const double> x, std::span<double> out);

/// The resolvent of S_i is constant: it returns the supply for any input and step.
void fixed_supply_resolvent(const NodeOperator& s, double sigma, std::span<const double> y,
                            std::span<double> out);

}  // namespace netequil
