#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "ncplace/topology.hpp"

using namespace ncplace;

TEST(Topology, RejectsBadEdges) {
  OverlayGraph g;
  g.add_node({0, Role::Source});
  g.add_node({1, Role::Client});
  EXPECT_THROW(g.add_edge({0, 1, 0.0, 0.0}), TopologyError);
  EXPECT_THROW(g.add_edge({0, 1, 1.0, 1.0}), TopologyError);
  EXPECT_THROW(g.add_edge({0, 1, 1.0, -0.1}), TopologyError);
  EXPECT_THROW(g.add_edge({0, 2, 1.0, 0.0}), TopologyError);
  EXPECT_THROW(g.add_node({0, Role::SF}), TopologyError);
}

TEST(Topology, CycleDetected) {
  auto g = fixtures::make({{0, Role::Source}, {1, Role::SF}, {2, Role::SF}, {3, Role::Client}},
                          {{0, 1, 1, 0}, {1, 2, 1, 0}, {2, 1, 1, 0}, {2, 3, 1, 0}});
  EXPECT_THROW(g.validate(), TopologyError);
}

TEST(Topology, SourceAndClientDirection) {
  auto g = fixtures::make({{0, Role::Source}, {1, Role::Client}, {2, Role::SF}}, {{0, 1, 1, 0}, {1, 2, 1, 0}});
  EXPECT_THROW(g.validate(), TopologyError);
}

TEST(Topology, Bandwidths) {
  const auto g = fixtures::diamond(10, 0.1);
  EXPECT_DOUBLE_EQ(g.out_bandwidth(0), 20.0);
  EXPECT_DOUBLE_EQ(g.in_bandwidth(3), 20.0);
  EXPECT_EQ(g.topological_order(), (std::vector<NodeId>{0, 1, 2, 3}));
}

TEST(Topology, PruneDropsDeadEnds) {
  auto g = fixtures::make({{0, Role::Source}, {1, Role::SF}, {2, Role::SF}, {3, Role::Client}, {4, Role::SF}},
                          {{0, 1, 1, 0}, {1, 3, 1, 0}, {0, 2, 1, 0}, {4, 3, 1, 0}});
  const auto p = prune(g);
  EXPECT_EQ(p.node_count(), 3u);
  EXPECT_FALSE(p.has_node(2));
  EXPECT_FALSE(p.has_node(4));
  auto none = fixtures::make({{0, Role::Source}, {1, Role::Client}}, {});
  EXPECT_FALSE(try_prune(none).has_value());
}

TEST(Topology, FileRoundTrip) {
  const auto g = fixtures::butterfly(3.25, 0.05);
  std::stringstream ss;
  write_topology(ss, g);
  EXPECT_EQ(read_topology(ss), g);
}

TEST(Topology, ParseErrorsNameLineAndField) {
  std::istringstream bad("node 0 source 16\nnode 1 client 16\nedge 0 1 abc 0.05\n");
  try {
    read_topology(bad, "t.topo");
    FAIL() << "expected an error";
  } catch (const TopologyError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("t.topo:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bandwidth_pps"), std::string::npos) << msg;
  }
  std::istringstream role("node 0 teacher 16\n");
  EXPECT_THROW(read_topology(role), TopologyError);
  std::istringstream loss("node 0 source 16\nnode 1 client 16\nedge 0 1 5 1.0\n");
  EXPECT_THROW(read_topology(loss), TopologyError);
}

TEST(Topology, GeneratedChainShape) {
  GenerateParams p;
  p.n_nodes = 3;
  p.n_sources = 1;
  p.n_clients = 1;
  p.parents_per_node = 1;
  const auto g = generate(p, 5);
  ASSERT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edges().size(), 2u);
  EXPECT_EQ(g.sources().size(), 1u);
  EXPECT_EQ(g.clients().size(), 1u);
}

TEST(Topology, GeneratedGraphsSatisfyInvariants) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GenerateParams p;
    const auto g = generate(p, seed);
    ASSERT_NO_THROW(g.validate());
    for (const auto& n : g.nodes()) {
      EXPECT_LE(g.in_edges(n.id).size(), 4u);
      if (n.role != Role::Source) {
        EXPECT_FALSE(g.in_edges(n.id).empty());
      }
    }
    for (const auto& e : g.edges()) EXPECT_DOUBLE_EQ(e.loss, 0.05);
    EXPECT_EQ(prune(g), g);
  }
}

TEST(Topology, GenerationIsDeterministic) {
  GenerateParams p;
  p.link_probability = 0.5;
  EXPECT_EQ(generate(p, 42), generate(p, 42));
  EXPECT_FALSE(generate(p, 42) == generate(p, 43));
}

TEST(Topology, SparseAdjacencyDeepensGraphs) {
  GenerateParams dense;
  dense.n_nodes = 120;
  GenerateParams sparse = dense;
  sparse.link_probability = 0.5;
  double d_dense = 0, d_sparse = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    d_dense += diameter(generate(dense, s));
    d_sparse += diameter(generate(sparse, s));
  }
  EXPECT_GT(d_sparse, d_dense);
}

TEST(Topology, UnsatisfiableAdjacencyFails) {
  GenerateParams p;
  p.adjacency = [](int, int) { return false; };
  p.max_rejections = 50;
  EXPECT_THROW(generate(p, 1), TopologyError);
}

TEST(Topology, TraceDrivesAdjacencyAndBandwidth) {
  const auto path = std::filesystem::temp_directory_path() / "ncplace_trace_test.txt";
  {
    std::ofstream os(path);
    os << "# 4 hosts\n4\n0 2000 2000 0\n2000 0 4000 2000\n4000 0 0 6000\n6000 6000 6000 0\n";
  }
  GenerateParams p;
  p.n_nodes = 4;
  p.n_clients = 1;
  use_trace(p, load_trace(path), 1.0 / 200.0);
  const auto g = generate(p, 3);
  for (const auto& e : g.edges()) {
    EXPECT_TRUE(e.bandwidth == 10.0 || e.bandwidth == 20.0 || e.bandwidth == 30.0) << e.bandwidth;
  }
  std::filesystem::remove(path);
}

TEST(Topology, CorpusRespectsSizeRange) {
  GenerateParams p;
  p.n_nodes = 120;
  p.link_probability = 0.5;
  const auto corpus = generate_corpus(p, 4, 9, 32, 56);
  ASSERT_EQ(corpus.size(), 4u);
  for (const auto& g : corpus) {
    EXPECT_GE(g.node_count(), 32u);
    EXPECT_LE(g.node_count(), 56u);
  }
}

TEST(MaxFlowBound, Butterfly) {
  const auto g = fixtures::butterfly();
  EXPECT_DOUBLE_EQ(max_flow_bound(g, FlowMode::NetworkCoding), 4.0);
  EXPECT_DOUBLE_EQ(max_flow_bound(g, FlowMode::Routing), 3.0);
}

TEST(MaxFlowBound, ChainUsesErasureCapacity) {
  const auto g = fixtures::chain(2, 10.0, 0.2);
  EXPECT_NEAR(max_flow_bound(g, FlowMode::NetworkCoding), 8.0, 1e-12);
}

TEST(MaxFlowBound, RoutingNeverExceedsCoding) {
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto g = generate(GenerateParams{}, s);
    EXPECT_LE(max_flow_bound(g, FlowMode::Routing), max_flow_bound(g, FlowMode::NetworkCoding) + 1e-9);
  }
}

TEST(Neighborhood, RadiusOneKeepsDirectNeighbors) {
  const auto g = fixtures::chain(4, 10, 0.0);
  const auto sub = neighborhood(g, 2, 1);
  ASSERT_TRUE(sub.has_value());
  EXPECT_EQ(sub->node_count(), 3u);
  EXPECT_EQ(sub->role(1), Role::Source);
  EXPECT_EQ(sub->role(3), Role::Client);
  EXPECT_EQ(sub->role(2), Role::SF);
}

TEST(Neighborhood, ProxySourceCappedByIncomingBandwidth) {
  // 0 -(5)-> 1 -(20)-> 2 -(20)-> 3: node 1 can only forward 5 pps
  auto g = fixtures::make({{0, Role::Source}, {1, Role::SF}, {2, Role::SF}, {3, Role::Client}},
                          {{0, 1, 5, 0}, {1, 2, 20, 0}, {2, 3, 20, 0}});
  const auto sub = neighborhood(g, 2, 1);
  ASSERT_TRUE(sub.has_value());
  EXPECT_DOUBLE_EQ(sub->out_bandwidth(1), 5.0);
}

TEST(Neighborhood, FullRadiusIsWholeGraph) {
  const auto g = fixtures::butterfly();
  const auto sub = neighborhood(g, 2, diameter(g));
  ASSERT_TRUE(sub.has_value());
  EXPECT_EQ(*sub, g);
}

TEST(ProcessingOrder, UpstreamFirst) {
  auto g = fixtures::chain(4, 10, 0.0);
  g.set_role(3, Role::NC);
  g.set_role(1, Role::NC);
  EXPECT_EQ(nc_processing_order(g), (std::vector<NodeId>{1, 3}));
}
