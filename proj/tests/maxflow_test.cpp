#include <gtest/gtest.h>

#include <random>

#include "ncplace/maxflow.hpp"

using ncplace::FlowNetwork;

namespace {

struct Arc {
  std::size_t from, to;
  double cap;
};

// Minimum over all s-t cuts, enumerating every vertex subset.
double min_cut(std::size_t n, const std::vector<Arc>& arcs, std::size_t s, std::size_t t) {
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (!(mask >> s & 1u) || (mask >> t & 1u)) continue;
    double cut = 0.0;
    for (const auto& a : arcs)
      if ((mask >> a.from & 1u) && !(mask >> a.to & 1u)) cut += a.cap;
    best = std::min(best, cut);
  }
  return best;
}

}  // namespace

TEST(MaxFlow, MatchesMinCutEnumeration) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> cap(0.5, 10.0);
  std::bernoulli_distribution present(0.4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 7;
    std::vector<Arc> arcs;
    FlowNetwork f(n);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (u != v && present(rng)) {
          arcs.push_back({u, v, cap(rng)});
          f.add_edge(u, v, arcs.back().cap);
        }
    ASSERT_NEAR(f.max_flow(0, n - 1), min_cut(n, arcs, 0, n - 1), 1e-9);
  }
}

TEST(MaxFlow, InfiniteLinks) {
  FlowNetwork f(4);
  f.add_edge(0, 1, FlowNetwork::kInfinity);
  f.add_edge(1, 2, 3.0);
  f.add_edge(2, 3, FlowNetwork::kInfinity);
  EXPECT_DOUBLE_EQ(f.max_flow(0, 3), 3.0);
}

TEST(MaxFlow, DisconnectedIsZero) {
  FlowNetwork f(3);
  f.add_edge(0, 1, 1.0);
  EXPECT_DOUBLE_EQ(f.max_flow(0, 2), 0.0);
}
