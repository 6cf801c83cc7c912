#include "netequil/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <variant>

#include "netequil/errors.hpp"

namespace netequil::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Interval point(double v) { return {v, v}; }

Interval phi_subgradient(const ScalarFunction& phi, double xi) {
  return std::visit(overloaded{
                        [](const PhiZero&) { return point(0.0); },
                        [](const PhiAffine& f) { return point(f.a); },
                        [&](const PhiQuadratic& f) { return point(f.a * xi); },
                        [&](const PhiPower& f) {
                          if (f.q == 1.0) {
                            if (xi > 0) return point(f.c);
                            if (xi < 0) return point(-f.c);
                            return Interval{-f.c, f.c};
                          }
                          if (f.q == 2.0) return point(2.0 * f.c * xi);
                          return point(1.5 * f.c * std::copysign(std::sqrt(std::abs(xi)), xi));
                        },
                    },
                    phi);
}

// Squared distance from (p, t) to the graph of the normal cone of [lo, hi]:
// the interior segment {(xi, 0)} plus the rays (lo, t <= 0) and (hi, t >= 0).
// Unlike the distance from t to the cone at p alone, this is continuous in p.
double graph_distance2(double t, double p, double lo, double hi) {
  if (lo == hi) return 0.0;
  const double to_lo = p - lo, to_hi = hi - p;
  const double at_lo = to_lo * to_lo + std::max(t, 0.0) * std::max(t, 0.0);
  const double at_hi = to_hi * to_hi + std::max(-t, 0.0) * std::max(-t, 0.0);
  return std::min({t * t, at_lo, at_hi});
}

// Whether the branch selected by graph_distance2 varies with t.
bool depends_on_level(double t, double p, double lo, double hi) {
  if (lo == hi) return false;
  const double to_lo = p - lo, to_hi = hi - p;
  const double at_lo = to_lo * to_lo + std::max(t, 0.0) * std::max(t, 0.0);
  const double at_hi = to_hi * to_hi + std::max(-t, 0.0) * std::max(-t, 0.0);
  if (t * t <= std::min(at_lo, at_hi)) return true;
  return at_lo <= at_hi ? t > 0 : t < 0;
}

// Levels where the branch achieving graph_distance2(y - level, ...) can change.
void add_breakpoints(double y, double p, double lo, double hi, std::vector<double>& out) {
  const double a = p - lo, b = hi - p;
  out.push_back(y);
  out.push_back(y + a);
  out.push_back(y - b);
  if (std::isfinite(a) && std::isfinite(b)) {
    const double c = std::sqrt(std::abs(b * b - a * a));
    out.push_back(y - c);
    out.push_back(y + c);
  }
}

std::vector<std::size_t> label_correcting(const Network& net, const std::vector<double>& cost,
                                          std::size_t root, bool reverse) {
  // pred[i]: arc leading from i toward the root (reverse) or from the root into i.
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(net.num_nodes(), kInf);
  std::vector<std::size_t> pred(net.num_nodes(), kNone);
  std::vector<bool> queued(net.num_nodes(), false);
  std::deque<std::size_t> queue{root};
  dist[root] = 0.0;
  queued[root] = true;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    queued[i] = false;
    for (const auto& inc : net.incident(i)) {
      // Forward search relaxes outgoing arcs, reverse search incoming ones.
      if ((inc.sign > 0) == reverse) continue;
      const Arc& a = net.arcs()[inc.arc];
      const std::size_t other = reverse ? a.tail : a.head;
      const double d = dist[i] + cost[inc.arc];
      if (d < dist[other]) {
        dist[other] = d;
        pred[other] = inc.arc;
        if (!queued[other]) {
          queued[other] = true;
          queue.push_back(other);
        }
      }
    }
  }
  return pred;
}

}  // namespace

Interval capacity_values(const ScalarCapacity& c, double xi) {
  return std::visit(
      overloaded{
          [&](const Bpr& b) {
            return point(xi >= 0 ? b.theta * (1.0 + b.alpha * std::pow(xi / b.rho, b.p)) : b.theta);
          },
          [&](const Logarithmic& l) {
            if (!(xi < l.omega)) return Interval{kInf, -kInf};
            return point(l.theta + std::log(l.omega / (l.omega - xi)));
          },
          [&](const Trc& t) {
            const double d = xi - t.omega;
            return point(t.delta + t.alpha * d + std::sqrt(t.alpha * t.alpha * d * d + t.beta));
          },
          [&](const PowerExp& e) { return point(e.theta * std::pow(e.alpha, e.p * xi)); },
          [&](const IntervalProx& ip) {
            if (!(xi >= ip.lo && xi <= ip.hi)) return Interval{kInf, -kInf};
            Interval g = phi_subgradient(ip.phi, xi);
            if (ip.lo == ip.hi) return Interval{-kInf, kInf};
            if (xi == ip.lo) g.lo = -kInf;
            if (xi == ip.hi) g.hi = kInf;
            return g;
          },
      },
      c);
}

double capacity_value(const ScalarCapacity& c, double xi) {
  const Interval g = capacity_values(c, xi);
  if (g.empty() || g.lo != g.hi) return std::numeric_limits<double>::quiet_NaN();
  return g.lo;
}

void TwoArcInstance::validate() const {
  if (!(a1 >= 0 && a2 >= 0)) throw ConfigError("two-arc instance: free-flow costs must be >= 0");
  if (!(b1 > 0 && b2 > 0)) throw ConfigError("two-arc instance: slopes must be > 0");
  if (!(demand > 0)) throw ConfigError("two-arc instance: demand must be > 0");
}

TwoArcSolution analytic_two_arc(const TwoArcInstance& inst) {
  inst.validate();
  const double d = inst.demand;
  // Corner: arc 1 alone is no dearer at full demand than arc 2 at zero flow.
  if (inst.a1 + inst.b1 * d <= inst.a2) {
    const double cost = inst.a1 + inst.b1 * d;
    return {d, 0.0, cost, cost, true};
  }
  if (inst.a2 + inst.b2 * d <= inst.a1) {
    const double cost = inst.a2 + inst.b2 * d;
    return {0.0, d, cost, cost, true};
  }
  const double x1 = (inst.a2 - inst.a1 + inst.b2 * d) / (inst.b1 + inst.b2);
  const double x2 = d - x1;
  const double cost = inst.a1 + inst.b1 * x1;
  return {x1, x2, cost, cost, false};
}

Problem make_two_arc_problem(const TwoArcInstance& inst) {
  inst.validate();
  if (!(inst.a1 > 0 && inst.a2 > 0)) {
    throw ConfigError("two-arc instance: BPR realisation needs positive free-flow costs");
  }
  Network net({"a", "b"}, {{"e1", "a", "b"}, {"e2", "a", "b"}}, {"flow"});
  OperatorSet ops;
  ops.arcs.push_back({Bpr{inst.b1 / inst.a1, 1.0, inst.a1, 1.0}, Box::orthant(1)});
  ops.arcs.push_back({Bpr{inst.b2 / inst.a2, 1.0, inst.a2, 1.0}, Box::orthant(1)});
  ops.nodes.push_back({{inst.demand}});
  ops.nodes.push_back({{-inst.demand}});
  return {std::move(net), std::move(ops)};
}

Problem make_braess_problem(double demand) {
  if (!(demand > 0)) throw ConfigError("braess instance: demand must be > 0");
  Network net({"s", "a", "b", "t"},
              {{"sa", "s", "a"}, {"sb", "s", "b"}, {"ab", "a", "b"}, {"at", "a", "t"}, {"bt", "b", "t"}},
              {"flow"});
  auto affine = [](double a, double b) { return Bpr{b / a, 1.0, a, 1.0}; };
  OperatorSet ops;
  for (const Bpr& c : {affine(1, 2), affine(5, 0.5), affine(1, 0.5), affine(5, 0.5), affine(1, 2)}) {
    ops.arcs.push_back({c, Box::orthant(1)});
  }
  ops.nodes = {{{demand}}, {{0.0}}, {{0.0}}, {{-demand}}};
  return {std::move(net), std::move(ops)};
}

Flow frank_wolfe_reference(const Network& net, const std::vector<Bpr>& costs,
                           const std::vector<double>& supply, std::size_t iterations) {
  if (net.num_commodities() != 1) throw ConfigError("frank-wolfe: single commodity only");
  if (costs.size() != net.num_arcs() || supply.size() != net.num_nodes()) {
    throw ConfigError("frank-wolfe: cost or supply count does not match the network");
  }
  std::vector<std::size_t> origins, destinations;
  double balance = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < supply.size(); ++i) {
    if (supply[i] > 0) origins.push_back(i);
    if (supply[i] < 0) destinations.push_back(i);
    balance += supply[i];
    scale += std::abs(supply[i]);
  }
  if (std::abs(balance) > 1e-12 * std::max(1.0, scale)) {
    throw ConfigError("frank-wolfe: supplies do not balance");
  }
  const bool single_origin = origins.size() == 1;
  if (!single_origin && destinations.size() != 1 && !origins.empty()) {
    throw ConfigError("frank-wolfe: need a single origin or a single destination");
  }

  std::vector<double> arc_cost(net.num_arcs());
  auto all_or_nothing = [&](const std::vector<double>& flow) {
    for (std::size_t j = 0; j < net.num_arcs(); ++j) {
      arc_cost[j] = capacity_value(costs[j], flow[j]);
    }
    std::vector<double> y(net.num_arcs(), 0.0);
    if (origins.empty()) return y;
    const std::size_t root = single_origin ? origins.front() : destinations.front();
    const auto pred = label_correcting(net, arc_cost, root, !single_origin);
    const auto& ends = single_origin ? destinations : origins;
    for (std::size_t e : ends) {
      const double amount = std::abs(supply[e]);
      std::size_t node = e;
      while (node != root) {
        const std::size_t j = pred[node];
        if (j == std::numeric_limits<std::size_t>::max()) {
          throw DomainError("frank-wolfe: node '" + net.node_ids()[e] +
                            "' is disconnected from node '" + net.node_ids()[root] + "'");
        }
        y[j] += amount;
        node = single_origin ? net.arcs()[j].tail : net.arcs()[j].head;
      }
    }
    return y;
  };

  std::vector<double> x = all_or_nothing(std::vector<double>(net.num_arcs(), 0.0));
  for (std::size_t k = 0; k < iterations; ++k) {
    const auto y = all_or_nothing(x);
    const double step = 2.0 / (static_cast<double>(k) + 2.0);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += step * (y[j] - x[j]);
  }

  Flow out = net.zero_flow();
  for (std::size_t j = 0; j < x.size(); ++j) out[j][0] = x[j];
  return out;
}

WardropReport wardrop_residual(const Network& net, const OperatorSet& ops, const Flow& x,
                               const Potential& v) {
  const std::size_t dim = net.num_commodities();
  if (x.blocks() != net.num_arcs() || x.dim() != dim || v.blocks() != net.num_nodes() ||
      v.dim() != dim) {
    throw DomainError("wardrop_residual: flow or potential does not match the network");
  }
  WardropReport report;
  std::vector<double> y(dim), p(dim);

  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    const auto& op = ops.arcs[j];
    const auto xj = x[j];
    double total = 0.0;
    for (double val : xj) total += val;
    const Interval g = capacity_values(op.capacity, total);
    if (g.empty()) {
      report.value = kInf;
      report.diagnostic = "arc '" + net.arc(j).id + "': total flux outside the capacity domain";
      return report;
    }

    double infeasible = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      p[k] = std::clamp(xj[k], op.constraint.lo[k], op.constraint.hi[k]);
      infeasible += (xj[k] - p[k]) * (xj[k] - p[k]);
    }
    const auto head = v[net.arc(j).head];
    const auto tail = v[net.arc(j).tail];
    for (std::size_t k = 0; k < dim; ++k) y[k] = head[k] - tail[k];
    auto gap = [&](double level) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        acc += graph_distance2(y[k] - level, p[k], op.constraint.lo[k], op.constraint.hi[k]);
      }
      return acc;
    };
    double best = gap(std::isfinite(g.lo) ? g.lo : g.hi);
    if (g.lo < g.hi) {
      // Piecewise sum of terms c_k + w_k (y_k - level)^2 with w_k in {0, 1};
      // on each piece the minimiser is the mean of the weighted y_k.
      std::vector<double> cuts{g.lo, g.hi};
      for (std::size_t k = 0; k < dim; ++k) {
        add_breakpoints(y[k], p[k], op.constraint.lo[k], op.constraint.hi[k], cuts);
      }
      std::erase_if(cuts, [&](double c) { return !(c >= g.lo && c <= g.hi); });
      std::sort(cuts.begin(), cuts.end());
      for (double c : cuts) {
        if (std::isfinite(c)) best = std::min(best, gap(c));
      }
      for (std::size_t n = 0; n + 1 < cuts.size(); ++n) {
        const double a = cuts[n], b = cuts[n + 1];
        double mid = 0.0;
        if (std::isfinite(a) && std::isfinite(b)) {
          mid = 0.5 * (a + b);
        } else if (std::isfinite(a)) {
          mid = a + 1.0;
        } else if (std::isfinite(b)) {
          mid = b - 1.0;
        }
        double sum = 0.0;
        int count = 0;
        for (std::size_t k = 0; k < dim; ++k) {
          if (depends_on_level(y[k] - mid, p[k], op.constraint.lo[k], op.constraint.hi[k])) {
            sum += y[k];
            ++count;
          }
        }
        const double stationary = count > 0 ? std::clamp(sum / count, a, b) : mid;
        best = std::min(best, gap(stationary));
      }
    }
    report.value = std::max({report.value, std::sqrt(infeasible), std::sqrt(best)});
  }

  std::vector<double> div(dim);
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    divergence_at(net, x, i, div);
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = div[k] - ops.nodes[i].supply[k];
      acc += d * d;
    }
    report.value = std::max(report.value, std::sqrt(acc));
  }
  return report;
}

}  // namespace netequil::oracle
