#include "netequil/network.hpp"

#include <algorithm>

namespace netequil {

namespace {

template <class Map>
void index_unique(const std::vector<std::string>& ids, Map& lookup, const char* what) {
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (!lookup.emplace(ids[k], k).second) {
      throw DomainError(std::string("duplicate ") + what + " id '" + ids[k] + "'");
    }
  }
}

void check_shape(const Network& net, std::size_t blocks, std::size_t expected, std::size_t dim,
                 const char* what) {
  if (blocks != expected || dim != net.num_commodities()) {
    throw DomainError(std::string(what) + ": expected " + std::to_string(expected) + "x" +
                      std::to_string(net.num_commodities()) + " blocks, got " +
                      std::to_string(blocks) + "x" + std::to_string(dim));
  }
}

}  // namespace

Network::Network(std::vector<std::string> nodes, std::vector<ArcEndpoints> arcs,
                 std::vector<std::string> commodities)
    : node_ids_(std::move(nodes)), commodity_ids_(std::move(commodities)) {
  if (node_ids_.empty()) throw DomainError("network needs at least one node");
  if (arcs.empty()) throw DomainError("network needs at least one arc");
  if (commodity_ids_.empty()) throw DomainError("network needs at least one commodity");

  index_unique(node_ids_, node_lookup_, "node");
  index_unique(commodity_ids_, commodity_lookup_, "commodity");

  arcs_.reserve(arcs.size());
  for (auto& a : arcs) {
    auto tail = node_lookup_.find(a.tail);
    auto head = node_lookup_.find(a.head);
    if (tail == node_lookup_.end()) {
      throw DomainError("arc '" + a.id + "': unknown tail node '" + a.tail + "'");
    }
    if (head == node_lookup_.end()) {
      throw DomainError("arc '" + a.id + "': unknown head node '" + a.head + "'");
    }
    if (tail->second == head->second) {
      throw DomainError("arc '" + a.id + "' is a self-loop on node '" + a.tail + "'");
    }
    if (!arc_lookup_.emplace(a.id, arcs_.size()).second) {
      throw DomainError("duplicate arc id '" + a.id + "'");
    }
    arcs_.push_back(Arc{std::move(a.id), tail->second, head->second});
  }

  std::vector<std::size_t> degree(node_ids_.size(), 0);
  for (const auto& a : arcs_) {
    ++degree[a.tail];
    ++degree[a.head];
  }
  incident_offsets_.assign(node_ids_.size() + 1, 0);
  for (std::size_t i = 0; i < degree.size(); ++i) {
    incident_offsets_[i + 1] = incident_offsets_[i] + degree[i];
  }
  incident_.resize(incident_offsets_.back());
  std::vector<std::size_t> cursor(incident_offsets_.begin(), incident_offsets_.end() - 1);
  // Arcs are visited in ascending order, so each node's list comes out sorted.
  for (std::size_t j = 0; j < arcs_.size(); ++j) {
    incident_[cursor[arcs_[j].tail]++] = {j, +1};
    incident_[cursor[arcs_[j].head]++] = {j, -1};
  }
}

const Arc& Network::arc(std::size_t j) const {
  if (j >= arcs_.size()) throw DomainError("arc index " + std::to_string(j) + " out of range");
  return arcs_[j];
}

std::size_t Network::node_index(const std::string& id) const {
  auto it = node_lookup_.find(id);
  if (it == node_lookup_.end()) throw DomainError("unknown node '" + id + "'");
  return it->second;
}

std::size_t Network::arc_index(const std::string& id) const {
  auto it = arc_lookup_.find(id);
  if (it == arc_lookup_.end()) throw DomainError("unknown arc '" + id + "'");
  return it->second;
}

std::size_t Network::commodity_index(const std::string& id) const {
  auto it = commodity_lookup_.find(id);
  if (it == commodity_lookup_.end()) throw DomainError("unknown commodity '" + id + "'");
  return it->second;
}

std::span<const Network::Incidence> Network::incident(std::size_t i) const {
  if (i >= node_ids_.size()) {
    throw DomainError("node index " + std::to_string(i) + " out of range");
  }
  return {incident_.data() + incident_offsets_[i], incident_offsets_[i + 1] - incident_offsets_[i]};
}

int Network::incidence(std::size_t i, std::size_t j) const {
  if (i >= node_ids_.size()) {
    throw DomainError("node index " + std::to_string(i) + " out of range");
  }
  const Arc& a = arc(j);
  if (a.tail == i) return +1;
  if (a.head == i) return -1;
  return 0;
}

bool Network::operator==(const Network& other) const {
  return node_ids_ == other.node_ids_ && commodity_ids_ == other.commodity_ids_ &&
         arcs_ == other.arcs_;
}

void divergence_at(const Network& net, const ArcVector& x, std::size_t i, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& inc : net.incident(i)) {
    auto xj = x[inc.arc];
    if (inc.sign > 0) {
      for (std::size_t k = 0; k < out.size(); ++k) out[k] += xj[k];
    } else {
      for (std::size_t k = 0; k < out.size(); ++k) out[k] -= xj[k];
    }
  }
}

NodeVector divergence(const Network& net, const ArcVector& x) {
  check_shape(net, x.blocks(), net.num_arcs(), x.dim(), "divergence");
  NodeVector out(net.num_nodes(), net.num_commodities());
  for (std::size_t i = 0; i < net.num_nodes(); ++i) divergence_at(net, x, i, out[i]);
  return out;
}

void tension_at(const Network& net, const NodeVector& v, std::size_t j, std::span<double> out) {
  const Arc& a = net.arc(j);
  auto head = v[a.head];
  auto tail = v[a.tail];
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = head[k] - tail[k];
}

ArcVector tension(const Network& net, const NodeVector& v) {
  check_shape(net, v.blocks(), net.num_nodes(), v.dim(), "tension");
  ArcVector out(net.num_arcs(), net.num_commodities());
  for (std::size_t j = 0; j < net.num_arcs(); ++j) tension_at(net, v, j, out[j]);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace netequil
