// Generate one overlay, place three NC nodes greedily and compare the
// simulated delay against the all-SF and all-NC configurations.

#include <cstdio>

#include "ncplace/harness.hpp"

using namespace ncplace;

int main() {
  GenerateParams p;
  p.n_nodes = 120;
  p.link_probability = 0.5;
  const auto g = generate_corpus(p, 1, 7, 32, 56).front();

  const auto plan = selection::select_centralized(g, 3);
  sim::SimOptions o;
  o.packet_size = 0;
  const auto sf = sim::monte_carlo(g, o, 50);
  const auto nc = sim::monte_carlo(harness::all_nc(g), o, 50);

  std::printf("%zu nodes, %zu edges, diameter %d\n", g.node_count(), g.edges().size(), diameter(g));
  std::printf("all SF: %.3f s   all NC: %.3f s\n", sf.mean_delay(), nc.mean_delay());
  for (std::size_t k = 1; k <= plan.picks.size(); ++k) {
    const auto mc = sim::monte_carlo(selection::apply(g, plan, k), o, 50);
    std::printf("pick %zu: node %d  estimated %.3f s  simulated %.3f s\n", k, plan.picks[k - 1].node,
                plan.picks[k - 1].est_delay, mc.mean_delay());
  }
}
