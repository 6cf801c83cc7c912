#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netequil/errors.hpp"

namespace netequil {

struct ArcTag {};
struct NodeTag {};

/// Dense row-major storage of one R^C vector per arc (or per node).
///
/// The tag keeps arc-indexed and node-indexed quantities from being mixed up:
/// divergence maps arc blocks to node blocks and tension maps back.
template <class Tag>
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(std::size_t blocks, std::size_t dim, double fill = 0.0)
      : blocks_(blocks), dim_(dim), data_(blocks * dim, fill) {}

  std::size_t blocks() const { return blocks_; }
  std::size_t dim() const { return dim_; }

  std::span<double> operator[](std::size_t b) { return {data_.data() + b * dim_, dim_}; }
  std::span<const double> operator[](std::size_t b) const {
    return {data_.data() + b * dim_, dim_};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const BlockVector&) const = default;

 private:
  std::size_t blocks_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

using ArcVector = BlockVector<ArcTag>;
using NodeVector = BlockVector<NodeTag>;

/// Per-arc commodity fluxes x_j.
using Flow = ArcVector;
/// Per-arc dual variables x*_j.
using ArcDual = ArcVector;
/// Per-node commodity potentials v*_i.
using Potential = NodeVector;

struct Arc {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;

  bool operator==(const Arc&) const = default;
};

/// Directed multigraph carrying a fixed set of commodities.
///
/// Immutable after construction. Parallel arcs are allowed, self-loops are not.
/// Incidence coefficients are derived from (tail, head); no incidence matrix is
/// stored.
class Network {
 public:
  /// One endpoint of an arc as seen from a node: +1 if the node is the tail.
  struct Incidence {
    std::size_t arc;
    int sign;
  };

  struct ArcEndpoints {
    std::string id;
    std::string tail;
    std::string head;
  };

  Network(std::vector<std::string> nodes, std::vector<ArcEndpoints> arcs,
          std::vector<std::string> commodities);

  std::size_t num_nodes() const { return node_ids_.size(); }
  std::size_t num_arcs() const { return arcs_.size(); }
  std::size_t num_commodities() const { return commodity_ids_.size(); }

  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::vector<std::string>& commodity_ids() const { return commodity_ids_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Arc& arc(std::size_t j) const;

  std::size_t node_index(const std::string& id) const;
  std::size_t arc_index(const std::string& id) const;
  std::size_t commodity_index(const std::string& id) const;

  /// Arcs touching node i, ascending by arc index.
  std::span<const Incidence> incident(std::size_t i) const;

  /// +1 if i is the tail of j, -1 if it is the head, 0 otherwise.
  int incidence(std::size_t i, std::size_t j) const;

  Flow zero_flow() const { return Flow(num_arcs(), num_commodities()); }
  ArcDual zero_arc_dual() const { return ArcDual(num_arcs(), num_commodities()); }
  Potential zero_potential() const { return Potential(num_nodes(), num_commodities()); }

  bool operator==(const Network& other) const;

 private:
  std::vector<std::string> node_ids_;
  std::vector<std::string> commodity_ids_;
  std::vector<Arc> arcs_;
  std::unordered_map<std::string, std::size_t> node_lookup_;
  std::unordered_map<std::string, std::size_t> arc_lookup_;
  std::unordered_map<std::string, std::size_t> commodity_lookup_;
  // CSR layout of incident arcs per node.
  std::vector<std::size_t> incident_offsets_;
  std::vector<Incidence> incident_;
};

/// div_i x = sum over outgoing arcs minus sum over incoming arcs.
///
/// Contributions are accumulated in ascending arc order for every node.
NodeVector divergence(const Network& net, const ArcVector& x);

/// Divergence at a single node, same summation order as divergence().
void divergence_at(const Network& net, const ArcVector& x, std::size_t i, std::span<double> out);

/// Delta_j v = v_head(j) - v_tail(j).
ArcVector tension(const Network& net, const NodeVector& v);

void tension_at(const Network& net, const NodeVector& v, std::size_t j, std::span<double> out);

double dot(std::span<const double> a, std::span<const double> b);

/// sum_i <a_i, b_i> in ascending block order.
template <class Tag>
double inner(const BlockVector<Tag>& a, const BlockVector<Tag>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.blocks(); ++i) acc += dot(a[i], b[i]);
  return acc;
}

}  // namespace netequil
