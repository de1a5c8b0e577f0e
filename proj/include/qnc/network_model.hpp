#pragma once

#include "qnc/common.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace qnc {

// Directed lossless link carrying up to `capacity_bits` per link use.
// Node and edge identifiers are zero-based.
struct Edge {
  EdgeId id = 0;
  NodeId tail = 0;
  NodeId head = 0;
  double capacity_bits = 1.0;

  bool operator==(const Edge&) const = default;
};

// Directed multigraph with a designated gateway (the decoder node).
//
// Construction validates the edge list: ids must equal positions, endpoints
// must be valid and distinct, capacities positive, and the gateway must have
// at least one incoming edge. Per-node In/Out lists are built once and are
// sorted by edge id. Instances are immutable.
class NetworkGraph {
 public:
  NetworkGraph(int node_count, std::vector<Edge> edges, NodeId gateway,
               std::uint64_t seed = 0);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  NodeId gateway() const { return gateway_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const;

  std::span<const EdgeId> incoming_edges(NodeId v) const;
  std::span<const EdgeId> outgoing_edges(NodeId v) const;

  // tail(e) for every edge, indexed by edge id.
  const std::vector<NodeId>& edge_tails() const { return tails_; }

  // True when every node has a directed path to the gateway.
  bool all_nodes_reach_gateway() const;

  bool operator==(const NetworkGraph& other) const {
    return node_count_ == other.node_count_ && gateway_ == other.gateway_ &&
           seed_ == other.seed_ && edges_ == other.edges_;
  }

 private:
  void check_node(NodeId v) const;

  int node_count_;
  std::vector<Edge> edges_;
  NodeId gateway_;
  std::uint64_t seed_;
  std::vector<NodeId> tails_;
  std::vector<std::vector<EdgeId>> in_;
  std::vector<std::vector<EdgeId>> out_;
};

// Free-function forms returning copies.
std::vector<EdgeId> incoming_edges(const NetworkGraph& g, NodeId v);
std::vector<EdgeId> outgoing_edges(const NetworkGraph& g, NodeId v);

struct CapacityModel {
  double constant_bits = 1.0;
  // Optional per-edge sampler; overrides `constant_bits` when set.
  std::function<double(std::mt19937_64&)> sampler;
};

struct DeploymentConfig {
  int node_count = 0;
  int edge_count = 0;
  CapacityModel capacity;
  std::uint64_t seed = 0;
  int max_attempts = 1000;
};

// Raised when a deployment cannot be produced (connectivity not reached
// within the attempt budget).
class InfeasibleDeployment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Uniform random deployment: every edge picks an ordered pair of distinct
// nodes uniformly, the gateway is uniform, and the draw is repeated until
// every node reaches the gateway.
NetworkGraph generate_deployment(const DeploymentConfig& cfg);

// Text form:
//   qnc-graph 1
//   nodes <n>
//   edges <|E|>
//   gateway <v0>
//   seed <seed>
//   <id> <tail> <head> <capacity>   (one line per edge)
void save_graph(std::ostream& os, const NetworkGraph& g);
NetworkGraph load_graph(std::istream& is);

}  // namespace qnc
