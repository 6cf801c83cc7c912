#include "netequil/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netequil/lambert_w.hpp"
#include "netequil/network.hpp"

namespace netequil {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBprTolerance = 1e-12;
constexpr int kBprMaxIterations = 200;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require(bool ok, const char* family, const char* message) {
  if (!ok) throw ConfigError(std::string(family) + ": " + message);
}

bool finite(double v) { return std::isfinite(v); }

void validate_phi(const ScalarFunction& phi) {
  std::visit(overloaded{
                 [](const PhiZero&) {},
                 [](const PhiAffine& f) {
                   require(finite(f.a) && finite(f.b), "affine", "coefficients must be finite");
                 },
                 [](const PhiQuadratic& f) {
                   require(finite(f.a) && f.a >= 0.0, "quadratic", "requires a >= 0");
                 },
                 [](const PhiPower& f) {
                   require(finite(f.c) && f.c >= 0.0, "power", "requires c >= 0");
                   require(f.q == 1.0 || f.q == 1.5 || f.q == 2.0, "power",
                           "exponent q must be 1, 1.5 or 2");
                 },
             },
             phi);
}

}  // namespace

Box Box::orthant(std::size_t dim) { return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, kInf)}; }

Box Box::whole_space(std::size_t dim) {
  return Box{std::vector<double>(dim, -kInf), std::vector<double>(dim, kInf)};
}

bool Box::is_orthant() const {
  return std::all_of(lo.begin(), lo.end(), [](double v) { return v == 0.0; }) &&
         std::all_of(hi.begin(), hi.end(), [](double v) { return v == kInf; });
}

void validate(const ScalarCapacity& c) {
  std::visit(overloaded{
                 [](const Bpr& b) {
                   require(finite(b.alpha) && b.alpha > 0, "bpr", "requires alpha > 0");
                   require(finite(b.rho) && b.rho > 0, "bpr", "requires rho > 0");
                   require(finite(b.theta) && b.theta > 0, "bpr", "requires theta > 0");
                   require(finite(b.p) && b.p > 0, "bpr", "requires p > 0");
                 },
                 [](const Logarithmic& l) {
                   require(finite(l.omega) && l.omega > 0, "log", "requires omega > 0");
                   require(finite(l.theta) && l.theta >= 0, "log", "requires theta >= 0");
                 },
                 [](const Trc& t) {
                   require(finite(t.alpha) && t.alpha > 0, "trc", "requires alpha > 0");
                   require(finite(t.beta) && t.beta > 0, "trc", "requires beta > 0");
                   require(finite(t.delta) && t.delta > 0, "trc", "requires delta > 0");
                   require(finite(t.omega) && t.omega > 0, "trc", "requires omega > 0");
                 },
                 [](const PowerExp& e) {
                   require(finite(e.alpha) && e.alpha > 1, "powexp", "requires alpha > 1");
                   require(finite(e.theta) && e.theta > 0, "powexp", "requires theta > 0");
                   require(finite(e.p) && e.p > 0, "powexp", "requires p > 0");
                 },
                 [](const IntervalProx& ip) {
                   validate_phi(ip.phi);
                   require(!std::isnan(ip.lo) && !std::isnan(ip.hi) && ip.lo <= ip.hi, "interval",
                           "requires lo <= hi");
                   require(ip.lo < kInf && ip.hi > -kInf, "interval", "interval is empty");
                 },
             },
             c);
}

void validate(const Box& box) {
  if (box.lo.size() != box.hi.size()) throw ConfigError("box: bound vectors differ in length");
  for (std::size_t k = 0; k < box.lo.size(); ++k) {
    if (std::isnan(box.lo[k]) || std::isnan(box.hi[k]) || box.lo[k] > box.hi[k] ||
        box.lo[k] == kInf || box.hi[k] == -kInf) {
      throw ConfigError("box: empty interval for commodity " + std::to_string(k));
    }
  }
}

void validate(const OperatorSet& ops, const Network& net) {
  if (ops.arcs.size() != net.num_arcs()) {
    throw ConfigError("expected " + std::to_string(net.num_arcs()) + " arc operators, got " +
                      std::to_string(ops.arcs.size()));
  }
  if (ops.nodes.size() != net.num_nodes()) {
    throw ConfigError("expected " + std::to_string(net.num_nodes()) + " node operators, got " +
                      std::to_string(ops.nodes.size()));
  }
  for (std::size_t j = 0; j < ops.arcs.size(); ++j) {
    try {
      validate(ops.arcs[j].capacity);
      validate(ops.arcs[j].constraint);
      if (ops.arcs[j].constraint.dim() != net.num_commodities()) {
        throw ConfigError("box dimension does not match commodity count");
      }
    } catch (const ConfigError& e) {
      throw ConfigError("arc '" + net.arc(j).id + "': " + e.what());
    }
  }
  for (std::size_t i = 0; i < ops.nodes.size(); ++i) {
    const auto& s = ops.nodes[i].supply;
    if (s.size() != net.num_commodities()) {
      throw ConfigError("node '" + net.node_ids()[i] + "': supply has " + std::to_string(s.size()) +
                        " entries, expected " + std::to_string(net.num_commodities()));
    }
    if (!std::all_of(s.begin(), s.end(), finite)) {
      throw ConfigError("node '" + net.node_ids()[i] + "': supply must be finite");
    }
  }
}

double resolvent_bpr(const Bpr& c, double gamma, double xi) {
  const double shift = gamma * c.theta;
  if (xi < shift) return xi - shift;

  // Root of k s^p + s - b on [0, b]; f(0) <= 0 <= f(b).
  const double b = xi - shift;
  if (b == 0.0) return 0.0;
  const double k = c.alpha * gamma * c.theta / std::pow(c.rho, c.p);
  double lo = 0.0;
  double hi = b;
  double s = b / (1.0 + k * std::pow(b, c.p - 1.0));
  for (int it = 0; it < kBprMaxIterations; ++it) {
    const double f = k * std::pow(s, c.p) + s - b;
    if (f == 0.0) return s;
    if (f > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    const double df = k * c.p * std::pow(s, c.p - 1.0) + 1.0;
    double next = s - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= kBprTolerance || hi - lo <= kBprTolerance) return next;
    s = next;
  }
  return s;
}

double resolvent_log(const Logarithmic& c, double gamma, double xi) {
  // W(omega/gamma * exp(theta - xi/gamma + omega/gamma)), taken in log space.
  const double z = std::log(c.omega / gamma) + c.theta + (c.omega - xi) / gamma;
  const double s = c.omega - gamma * lambert_w_exp(z);
  // Once gamma W drops below half an ulp of omega the formula rounds onto the
  // boundary of dom c; keep the result inside it.
  return std::min(s, std::nextafter(c.omega, -kInf));
}

double resolvent_trc(const Trc& c, double gamma, double xi) {
  const double ga = gamma * c.alpha;
  const double gd = gamma * c.delta;
  const double d = xi - gd - c.omega;
  const double root = std::sqrt(ga * ga * d * d + (2.0 * ga + 1.0) * gamma * gamma * c.beta);
  return (-root + ga * (xi - gd + c.omega) + xi - gd) / (2.0 * ga + 1.0);
}

double resolvent_powerexp(const PowerExp& c, double gamma, double xi) {
  const double plna = c.p * std::log(c.alpha);
  // log of gamma theta p ln(alpha) alpha^(p xi)
  const double z = std::log(gamma * c.theta * plna) + xi * plna;
  return xi - lambert_w_exp(z) / plna;
}

double prox(const ScalarFunction& phi, double gamma, double xi) {
  return std::visit(overloaded{
                        [&](const PhiZero&) { return xi; },
                        [&](const PhiAffine& f) { return xi - gamma * f.a; },
                        [&](const PhiQuadratic& f) { return xi / (1.0 + gamma * f.a); },
                        [&](const PhiPower& f) {
                          const double gc = gamma * f.c;
                          if (f.q == 1.0) {
                            return std::copysign(std::max(std::abs(xi) - gc, 0.0), xi);
                          }
                          if (f.q == 2.0) return xi / (1.0 + 2.0 * gc);
                          // t = sqrt|p| solves t^2 + 1.5 gc t - |xi| = 0.
                          const double h = 0.75 * gc;
                          const double t = std::abs(xi) / (h + std::sqrt(h * h + std::abs(xi)));
                          return std::copysign(t * t, xi);
                        },
                    },
                    phi);
}

double resolvent_interval_prox(const IntervalProx& c, double gamma, double xi) {
  return std::clamp(prox(c.phi, gamma, xi), c.lo, c.hi);
}

double resolvent(const ScalarCapacity& c, double gamma, double xi) {
  return std::visit(overloaded{
                        [&](const Bpr& b) { return resolvent_bpr(b, gamma, xi); },
                        [&](const Logarithmic& l) { return resolvent_log(l, gamma, xi); },
                        [&](const Trc& t) { return resolvent_trc(t, gamma, xi); },
                        [&](const PowerExp& e) { return resolvent_powerexp(e, gamma, xi); },
                        [&](const IntervalProx& ip) { return resolvent_interval_prox(ip, gamma, xi); },
                    },
                    c);
}

void lift_resolvent(const ScalarCapacity& c, double gamma, std::span<const double> x,
                    std::span<double> out) {
  const auto n = static_cast<double>(x.size());
  double total = 0.0;
  for (double v : x) total += v;
  const double eta = (resolvent(c, n * gamma, total) - total) / n;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] + eta;
}

void project_box(const Box& box, std::span<const double> x, std::span<double> out) {
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::clamp(x[k], box.lo[k], box.hi[k]);
}

void fixed_supply_resolvent(const NodeOperator& s, double /*sigma*/, std::span<const double> /*y*/,
                            std::span<double> out) {
  std::copy(s.supply.begin(), s.supply.end(), out.begin());
}

}  // namespace netequil
