#include "qnc/network_model.hpp"

#include "qnc/text_io.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace qnc {

NetworkGraph::NetworkGraph(int node_count, std::vector<Edge> edges,
                           NodeId gateway, std::uint64_t seed)
    : node_count_(node_count),
      edges_(std::move(edges)),
      gateway_(gateway),
      seed_(seed) {
  if (node_count_ < 1) throw std::invalid_argument("node_count must be positive");
  check_node(gateway_);
  in_.assign(node_count_, {});
  out_.assign(node_count_, {});
  tails_.reserve(edges_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.id != static_cast<EdgeId>(i)) {
      throw std::invalid_argument("edge ids must be 0..|E|-1 in order");
    }
    check_node(e.tail);
    check_node(e.head);
    if (e.tail == e.head) throw std::invalid_argument("self-loop on edge " + std::to_string(i));
    if (!(e.capacity_bits > 0.0)) {
      throw std::invalid_argument("capacity must be positive on edge " + std::to_string(i));
    }
    out_[e.tail].push_back(e.id);
    in_[e.head].push_back(e.id);
    tails_.push_back(e.tail);
  }
  if (in_[gateway_].empty()) {
    throw std::invalid_argument("gateway has no incoming edge");
  }
}

void NetworkGraph::check_node(NodeId v) const {
  if (v < 0 || v >= node_count_) {
    throw std::invalid_argument("invalid node id " + std::to_string(v));
  }
}

const Edge& NetworkGraph::edge(EdgeId e) const {
  if (e < 0 || e >= edge_count()) {
    throw std::invalid_argument("invalid edge id " + std::to_string(e));
  }
  return edges_[e];
}

std::span<const EdgeId> NetworkGraph::incoming_edges(NodeId v) const {
  check_node(v);
  return in_[v];
}

std::span<const EdgeId> NetworkGraph::outgoing_edges(NodeId v) const {
  check_node(v);
  return out_[v];
}

bool NetworkGraph::all_nodes_reach_gateway() const {
  // Reverse search from the gateway along incoming edges.
  std::vector<char> seen(node_count_, 0);
  std::vector<NodeId> stack{gateway_};
  seen[gateway_] = 1;
  int reached = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (EdgeId e : in_[v]) {
      NodeId u = edges_[e].tail;
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == node_count_;
}

std::vector<EdgeId> incoming_edges(const NetworkGraph& g, NodeId v) {
  auto s = g.incoming_edges(v);
  return {s.begin(), s.end()};
}

std::vector<EdgeId> outgoing_edges(const NetworkGraph& g, NodeId v) {
  auto s = g.outgoing_edges(v);
  return {s.begin(), s.end()};
}

NetworkGraph generate_deployment(const DeploymentConfig& cfg) {
  const int n = cfg.node_count;
  if (n < 2) throw std::invalid_argument("deployment needs at least 2 nodes");
  if (cfg.edge_count < n - 1) {
    throw std::invalid_argument("edge_count must be at least node_count - 1");
  }
  if (cfg.max_attempts < 1) throw std::invalid_argument("max_attempts must be positive");
  if (!cfg.capacity.sampler && !(cfg.capacity.constant_bits > 0.0)) {
    throw std::invalid_argument("capacity must be positive");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> pick_node(0, n - 1);
  std::uniform_int_distribution<int> pick_other(0, n - 2);

  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    const NodeId gateway = pick_node(rng);
    std::vector<Edge> edges;
    edges.reserve(cfg.edge_count);
    for (int i = 0; i < cfg.edge_count; ++i) {
      NodeId tail = pick_node(rng);
      NodeId head = pick_other(rng);
      if (head >= tail) ++head;
      double c = cfg.capacity.sampler ? cfg.capacity.sampler(rng)
                                      : cfg.capacity.constant_bits;
      edges.push_back({i, tail, head, c});
    }
    bool gateway_fed = false;
    for (const Edge& e : edges) gateway_fed |= (e.head == gateway);
    if (!gateway_fed) continue;
    NetworkGraph g(n, std::move(edges), gateway, cfg.seed);
    if (g.all_nodes_reach_gateway()) return g;
  }
  throw InfeasibleDeployment("no connected deployment after " +
                             std::to_string(cfg.max_attempts) + " attempts");
}

void save_graph(std::ostream& os, const NetworkGraph& g) {
  os << "qnc-graph 1\n"
     << "nodes " << g.node_count() << '\n'
     << "edges " << g.edge_count() << '\n'
     << "gateway " << g.gateway() << '\n'
     << "seed " << g.seed() << '\n';
  for (const Edge& e : g.edges()) {
    os << e.id << ' ' << e.tail << ' ' << e.head << ' '
       << text_io::format_double(e.capacity_bits) << '\n';
  }
}

NetworkGraph load_graph(std::istream& is) {
  text_io::expect_token(is, "qnc-graph");
  int version = 0;
  if (!(is >> version) || version != 1) {
    throw std::invalid_argument("unsupported graph format version");
  }
  int n = 0, m = 0;
  NodeId gateway = 0;
  std::uint64_t seed = 0;
  text_io::expect_token(is, "nodes");
  is >> n;
  text_io::expect_token(is, "edges");
  is >> m;
  text_io::expect_token(is, "gateway");
  is >> gateway;
  text_io::expect_token(is, "seed");
  is >> seed;
  if (!is || m < 0) throw std::invalid_argument("malformed graph header");
  std::vector<Edge> edges(m);
  for (Edge& e : edges) {
    if (!(is >> e.id >> e.tail >> e.head >> e.capacity_bits)) {
      throw std::invalid_argument("truncated edge list");
    }
  }
  return NetworkGraph(n, std::move(edges), gateway, seed);
}

}  // namespace qnc
