#include <omp.h>

#include <vector>

#include "step_kernels.hpp"

namespace netequil::detail {

namespace {

int team_size(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

}  // namespace

void evaluate_parallel(const Network& net, const OperatorSet& ops, const SolverConfig& cfg,
                       const SolverState& state, IterationWorkspace& ws,
                       const BlockSelection& active) {
  const std::size_t dim = net.num_commodities();
  const auto num_active_arcs = static_cast<std::ptrdiff_t>(active.arcs.size());
  const auto num_active_nodes = static_cast<std::ptrdiff_t>(active.nodes.size());
  const auto num_arcs = static_cast<std::ptrdiff_t>(net.num_arcs());
  const auto num_nodes = static_cast<std::ptrdiff_t>(net.num_nodes());

#pragma omp parallel num_threads(team_size(cfg.threads))
  {
    std::vector<double> tens(dim), arg(dim);

#pragma omp for schedule(static)
    for (std::ptrdiff_t a = 0; a < num_active_arcs; ++a) {
      const std::size_t j = active.arcs[a];
      const double g = cfg.gamma[j];
      const double m = cfg.mu[j];
      auto x = state.x[j];
      auto xd = state.xdual[j];
      auto ld = ws.ldual[j];
      auto q = ws.q[j];
      auto qd = ws.qdual[j];
      auto r = ws.r[j];
      auto rd = ws.rdual[j];
      tension_at(net, state.v, j, tens);
      for (std::size_t k = 0; k < dim; ++k) {
        ld[k] = xd[k] - tens[k];
        arg[k] = x[k] - g * ld[k];
      }
      lift_resolvent(ops.arcs[j].capacity, g, arg, q);
      for (std::size_t k = 0; k < dim; ++k) {
        qd[k] = (x[k] - q[k]) / g - ld[k];
        arg[k] = x[k] + m * xd[k];
      }
      project_box(ops.arcs[j].constraint, arg, r);
      for (std::size_t k = 0; k < dim; ++k) rd[k] = xd[k] + (x[k] - r[k]) / m;
    }

    // Node blocks only read x and v, so they need no barrier after the arcs.
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t a = 0; a < num_active_nodes; ++a) {
      const std::size_t i = active.nodes[a];
      const double sg = cfg.sigma[i];
      auto l = ws.l[i];
      auto s = ws.s[i];
      auto sd = ws.sdual[i];
      auto v = state.v[i];
      divergence_at(net, state.x, i, l);
      for (std::size_t k = 0; k < dim; ++k) arg[k] = l[k] + sg * v[k];
      fixed_supply_resolvent(ops.nodes[i], sg, arg, s);
      for (std::size_t k = 0; k < dim; ++k) sd[k] = v[k] + (l[k] - s[k]) / sg;
    }

#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < num_arcs; ++j) {
      for (std::size_t k = 0; k < dim; ++k) ws.x_minus_q[j][k] = state.x[j][k] - ws.q[j][k];
    }

#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < num_nodes; ++i) {
      auto t = ws.t[i];
      divergence_at(net, state.x, i, ws.div_x[i]);
      divergence_at(net, ws.x_minus_q, i, ws.div_xq[i]);
      ws.node_pi[i] = node_t_and_pi(ws.div_x[i], ws.div_xq[i], ws.s[i], ws.sdual[i], state.v[i], t);
      ws.node_tau[i] = dot(t, t);
    }

#pragma omp for schedule(static)
    for (std::ptrdiff_t j = 0; j < num_arcs; ++j) {
      auto td = ws.tdual[j];
      auto u = ws.u[j];
      auto q = ws.q[j];
      auto r = ws.r[j];
      tension_at(net, ws.sdual, j, tens);
      for (std::size_t k = 0; k < dim; ++k) {
        td[k] = ws.qdual[j][k] + ws.rdual[j][k] - tens[k];
        u[k] = r[k] - q[k];
      }
      ws.arc_tau[j] = dot(td, td) + dot(u, u);
      ws.arc_pi[j] = arc_pi_term(state.x[j], state.xdual[j], ws.x_minus_q[j], ws.qdual[j], r, ws.rdual[j]);
    }
  }

  ws.tau = sum_in_order(ws.arc_tau, ws.node_tau);
  ws.pi = sum_in_order(ws.arc_pi, ws.node_pi);
}

void update_parallel(SolverState& state, const IterationWorkspace& ws, double theta, int threads) {
  auto x = state.x.flat();
  auto xd = state.xdual.flat();
  auto v = state.v.flat();
  auto td = ws.tdual.flat();
  auto u = ws.u.flat();
  auto t = ws.t.flat();
  const auto arc_len = static_cast<std::ptrdiff_t>(x.size());
  const auto node_len = static_cast<std::ptrdiff_t>(v.size());

#pragma omp parallel num_threads(team_size(threads))
  {
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t k = 0; k < arc_len; ++k) {
      x[k] = x[k] - theta * td[k];
      xd[k] = xd[k] - theta * u[k];
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < node_len; ++k) v[k] = v[k] - theta * t[k];
  }
}

}  // namespace netequil::detail
