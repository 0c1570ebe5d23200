#pragma once

#include <vector>

#include "ncplace/topology.hpp"

namespace fixtures {

using ncplace::EdgeRecord;
using ncplace::NodeId;
using ncplace::OverlayGraph;
using ncplace::Role;

inline OverlayGraph make(const std::vector<std::pair<NodeId, Role>>& nodes, const std::vector<EdgeRecord>& edges,
                         int h = 16) {
  OverlayGraph g;
  for (auto [id, r] : nodes) g.add_node({id, r, h});
  for (const auto& e : edges) g.add_edge(e);
  return g;
}

/// 0 -> 1 -> ... -> n-1, source first, client last, SF in between.
inline OverlayGraph chain(int hops, double bw, double loss, int h = 16) {
  std::vector<std::pair<NodeId, Role>> nodes;
  std::vector<EdgeRecord> edges;
  for (int i = 0; i <= hops; ++i)
    nodes.push_back({i, i == 0 ? Role::Source : (i == hops ? Role::Client : Role::SF)});
  for (int i = 0; i < hops; ++i) edges.push_back({i, i + 1, bw, loss});
  return make(nodes, edges, h);
}

/// 0 -> {1, 2} -> 3(client).
inline OverlayGraph diamond(double bw, double loss) {
  return make({{0, Role::Source}, {1, Role::SF}, {2, Role::SF}, {3, Role::Client}},
              {{0, 1, bw, loss}, {0, 2, bw, loss}, {1, 3, bw, loss}, {2, 3, bw, loss}});
}

/// Two-source butterfly: sources 0,1 share the bottleneck 2 -> 3 and each
/// also reaches one client directly; clients 4,5.
inline OverlayGraph butterfly(double bw = 1.0, double loss = 0.0) {
  return make({{0, Role::Source}, {1, Role::Source}, {2, Role::SF}, {3, Role::SF}, {4, Role::Client},
               {5, Role::Client}},
              {{0, 4, bw, loss},
               {0, 2, bw, loss},
               {1, 2, bw, loss},
               {1, 5, bw, loss},
               {2, 3, bw, loss},
               {3, 4, bw, loss},
               {3, 5, bw, loss}});
}

inline OverlayGraph all_nc(OverlayGraph g) {
  for (NodeId u : g.sf_nodes()) g.set_role(u, Role::NC);
  return g;
}

}  // namespace fixtures
