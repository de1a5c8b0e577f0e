#include "qnc/network_model.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace qnc;

namespace {

DeploymentConfig config(int n, int edges, std::uint64_t seed) {
  DeploymentConfig c;
  c.node_count = n;
  c.edge_count = edges;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(NetworkGraph, RejectsMalformedEdgeLists) {
  EXPECT_THROW(NetworkGraph(2, {{0, 0, 0, 1.0}}, 0), std::invalid_argument);  // self-loop
  EXPECT_THROW(NetworkGraph(2, {{0, 0, 2, 1.0}}, 1), std::invalid_argument);  // bad head
  EXPECT_THROW(NetworkGraph(2, {{0, 0, 1, 0.0}}, 1), std::invalid_argument);  // capacity
  EXPECT_THROW(NetworkGraph(2, {{1, 0, 1, 1.0}}, 1), std::invalid_argument);  // id
  EXPECT_THROW(NetworkGraph(2, {{0, 0, 1, 1.0}}, 0), std::invalid_argument);  // gateway has no In
  EXPECT_NO_THROW(NetworkGraph(2, {{0, 0, 1, 1.0}}, 1));
}

TEST(NetworkGraph, ParallelEdgesAllowed) {
  NetworkGraph g(2, {{0, 0, 1, 1.0}, {1, 0, 1, 2.0}}, 1);
  EXPECT_EQ(g.incoming_edges(1).size(), 2u);
  EXPECT_EQ(g.outgoing_edges(0).size(), 2u);
}

TEST(NetworkGraph, InvalidNodeQueriesThrow) {
  NetworkGraph g(2, {{0, 0, 1, 1.0}}, 1);
  EXPECT_THROW(g.incoming_edges(2), std::invalid_argument);
  EXPECT_THROW(outgoing_edges(g, -1), std::invalid_argument);
}

TEST(GenerateDeployment, SmallestConnected) {
  const NetworkGraph g = generate_deployment(config(2, 1, 5));
  ASSERT_EQ(g.edge_count(), 1);
  const Edge& e = g.edge(0);
  EXPECT_EQ(e.head, g.gateway());
  EXPECT_NE(e.tail, g.gateway());
  EXPECT_EQ(incoming_edges(g, g.gateway()), std::vector<EdgeId>{0});
  EXPECT_TRUE(incoming_edges(g, e.tail).empty());
  EXPECT_EQ(outgoing_edges(g, e.tail), std::vector<EdgeId>{0});
  EXPECT_TRUE(outgoing_edges(g, g.gateway()).empty());
}

TEST(GenerateDeployment, LargeScaleSizes) {
  for (int edges : {1100, 1400, 1800}) {
    const NetworkGraph g = generate_deployment(config(100, edges, 11));
    EXPECT_EQ(g.node_count(), 100);
    EXPECT_EQ(g.edge_count(), edges);
    EXPECT_TRUE(g.all_nodes_reach_gateway());
  }
}

TEST(GenerateDeployment, SeedDeterminism) {
  const NetworkGraph a = generate_deployment(config(10, 30, 7));
  const NetworkGraph b = generate_deployment(config(10, 30, 7));
  EXPECT_EQ(a.edges(), b.edges());
  EXPECT_EQ(a.gateway(), b.gateway());
  const NetworkGraph c = generate_deployment(config(10, 30, 8));
  EXPECT_NE(a.edges(), c.edges());
}

TEST(GenerateDeployment, InOutPartition) {
  const NetworkGraph g = generate_deployment(config(15, 40, 3));
  std::multiset<EdgeId> in, out;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto i = incoming_edges(g, v);
    const auto o = outgoing_edges(g, v);
    EXPECT_TRUE(std::is_sorted(i.begin(), i.end()));
    EXPECT_TRUE(std::is_sorted(o.begin(), o.end()));
    for (EdgeId e : i) {
      EXPECT_EQ(g.edge(e).head, v);
      in.insert(e);
    }
    for (EdgeId e : o) {
      EXPECT_EQ(g.edge(e).tail, v);
      out.insert(e);
    }
  }
  ASSERT_EQ(in.size(), 40u);
  ASSERT_EQ(out.size(), 40u);
  for (EdgeId e = 0; e < 40; ++e) {
    EXPECT_EQ(in.count(e), 1u);
    EXPECT_EQ(out.count(e), 1u);
  }
}

TEST(GenerateDeployment, InvalidConfigs) {
  EXPECT_THROW(generate_deployment(config(10, 8, 1)), std::invalid_argument);
  EXPECT_THROW(generate_deployment(config(1, 0, 1)), std::invalid_argument);
  DeploymentConfig tight = config(30, 29, 1);
  tight.max_attempts = 1;
  // A spanning in-tree on the first draw is very unlikely.
  EXPECT_THROW(generate_deployment(tight), InfeasibleDeployment);
}

TEST(GenerateDeployment, CapacitySampler) {
  DeploymentConfig c = config(6, 12, 2);
  c.capacity.sampler = [](std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(1.0, 3.0)(rng);
  };
  const NetworkGraph g = generate_deployment(c);
  std::set<double> caps;
  for (const Edge& e : g.edges()) {
    EXPECT_GE(e.capacity_bits, 1.0);
    EXPECT_LT(e.capacity_bits, 3.0);
    caps.insert(e.capacity_bits);
  }
  EXPECT_GT(caps.size(), 1u);
}

TEST(GraphText, RoundTripIsLossless) {
  DeploymentConfig c = config(8, 20, 4);
  c.capacity.constant_bits = 1.0 / 3.0;
  const NetworkGraph g = generate_deployment(c);
  std::stringstream ss;
  save_graph(ss, g);
  const NetworkGraph h = load_graph(ss);
  EXPECT_EQ(g, h);
  std::stringstream again;
  save_graph(again, h);
  std::stringstream first;
  save_graph(first, g);
  EXPECT_EQ(first.str(), again.str());
}

TEST(GraphText, RejectsGarbage) {
  std::stringstream ss("qnc-graph 2\n");
  EXPECT_THROW(load_graph(ss), std::invalid_argument);
  std::stringstream truncated("qnc-graph 1\nnodes 2\nedges 1\ngateway 1\nseed 0\n");
  EXPECT_THROW(load_graph(truncated), std::invalid_argument);
}
