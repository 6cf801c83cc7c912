#include <vector>

#include "step_kernels.hpp"

namespace netequil::detail {

void evaluate_reference(const Network& net, const OperatorSet& ops, const SolverConfig& cfg,
                        const SolverState& state, IterationWorkspace& ws,
                        const BlockSelection& active) {
  const std::size_t dim = net.num_commodities();
  std::vector<double> tens(dim), arg(dim);

  for (std::size_t j : active.arcs) {
    const double g = cfg.gamma[j];
    const double m = cfg.mu[j];
    auto x = state.x[j];
    auto xd = state.xdual[j];
    auto ld = ws.ldual[j];
    tension_at(net, state.v, j, tens);
    for (std::size_t k = 0; k < dim; ++k) ld[k] = xd[k] - tens[k];

    for (std::size_t k = 0; k < dim; ++k) arg[k] = x[k] - g * ld[k];
    auto q = ws.q[j];
    lift_resolvent(ops.arcs[j].capacity, g, arg, q);
    auto qd = ws.qdual[j];
    for (std::size_t k = 0; k < dim; ++k) qd[k] = (x[k] - q[k]) / g - ld[k];

    for (std::size_t k = 0; k < dim; ++k) arg[k] = x[k] + m * xd[k];
    auto r = ws.r[j];
    project_box(ops.arcs[j].constraint, arg, r);
    auto rd = ws.rdual[j];
    for (std::size_t k = 0; k < dim; ++k) rd[k] = xd[k] + (x[k] - r[k]) / m;
  }

  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    for (std::size_t k = 0; k < dim; ++k) ws.x_minus_q[j][k] = state.x[j][k] - ws.q[j][k];
  }

  // Divergences by scattering arc contributions in ascending arc order.
  auto& div_x = ws.div_x;
  auto& div_d = ws.div_xq;
  div_x.fill(0.0);
  div_d.fill(0.0);
  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    const Arc& a = net.arcs()[j];
    for (std::size_t k = 0; k < dim; ++k) {
      div_x[a.tail][k] += state.x[j][k];
      div_x[a.head][k] -= state.x[j][k];
      div_d[a.tail][k] += ws.x_minus_q[j][k];
      div_d[a.head][k] -= ws.x_minus_q[j][k];
    }
  }

  for (std::size_t i : active.nodes) {
    const double sg = cfg.sigma[i];
    auto l = ws.l[i];
    for (std::size_t k = 0; k < dim; ++k) l[k] = div_x[i][k];
    for (std::size_t k = 0; k < dim; ++k) arg[k] = l[k] + sg * state.v[i][k];
    auto s = ws.s[i];
    fixed_supply_resolvent(ops.nodes[i], sg, arg, s);
    auto sd = ws.sdual[i];
    for (std::size_t k = 0; k < dim; ++k) sd[k] = state.v[i][k] + (l[k] - s[k]) / sg;
  }

  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    ws.node_pi[i] = node_t_and_pi(div_x[i], div_d[i], ws.s[i], ws.sdual[i], state.v[i], ws.t[i]);
    ws.node_tau[i] = dot(ws.t[i], ws.t[i]);
  }

  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    tension_at(net, ws.sdual, j, tens);
    auto td = ws.tdual[j];
    auto u = ws.u[j];
    for (std::size_t k = 0; k < dim; ++k) {
      td[k] = ws.qdual[j][k] + ws.rdual[j][k] - tens[k];
      u[k] = ws.r[j][k] - ws.q[j][k];
    }
  }

  for (std::size_t j = 0; j < net.num_arcs(); ++j) {
    ws.arc_tau[j] = dot(ws.tdual[j], ws.tdual[j]) + dot(ws.u[j], ws.u[j]);
    ws.arc_pi[j] =
        arc_pi_term(state.x[j], state.xdual[j], ws.x_minus_q[j], ws.qdual[j], ws.r[j], ws.rdual[j]);
  }
  ws.tau = sum_in_order(ws.arc_tau, ws.node_tau);
  ws.pi = sum_in_order(ws.arc_pi, ws.node_pi);
}

void update_reference(SolverState& state, const IterationWorkspace& ws, double theta) {
  for (std::size_t j = 0; j < state.x.blocks(); ++j) {
    for (std::size_t k = 0; k < state.x.dim(); ++k) {
      state.x[j][k] = state.x[j][k] - theta * ws.tdual[j][k];
      state.xdual[j][k] = state.xdual[j][k] - theta * ws.u[j][k];
    }
  }
  for (std::size_t i = 0; i < state.v.blocks(); ++i) {
    for (std::size_t k = 0; k < state.v.dim(); ++k) {
      state.v[i][k] = state.v[i][k] - theta * ws.t[i][k];
    }
  }
}

}  // namespace netequil::detail
