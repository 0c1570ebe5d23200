#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace ncplace {

/// Edmonds-Karp max flow on real capacities. Small graphs only; BFS
/// augmenting paths keep the number of rounds polynomial.
class FlowNetwork {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  explicit FlowNetwork(std::size_t n) : adj_(n) {}

  std::size_t size() const { return adj_.size(); }

  void add_edge(std::size_t from, std::size_t to, double capacity) {
    adj_[from].push_back(arcs_.size());
    arcs_.push_back({to, capacity});
    adj_[to].push_back(arcs_.size());
    arcs_.push_back({from, 0.0});
  }

  /// Max flow from s to t. The network is left untouched.
  double max_flow(std::size_t s, std::size_t t) const {
    if (s == t) return 0.0;
    std::vector<Arc> arcs = arcs_;
    double total = 0.0;
    std::vector<std::size_t> via(adj_.size());
    for (;;) {
      std::vector<bool> seen(adj_.size(), false);
      std::queue<std::size_t> q;
      q.push(s);
      seen[s] = true;
      while (!q.empty() && !seen[t]) {
        const std::size_t u = q.front();
        q.pop();
        for (std::size_t a : adj_[u]) {
          if (arcs[a].capacity <= kTolerance || seen[arcs[a].to]) continue;
          seen[arcs[a].to] = true;
          via[arcs[a].to] = a;
          q.push(arcs[a].to);
        }
      }
      if (!seen[t]) break;
      double push = kInfinity;
      for (std::size_t v = t; v != s; v = arcs[via[v] ^ 1].to) push = std::min(push, arcs[via[v]].capacity);
      if (push == kInfinity) return kInfinity;
      for (std::size_t v = t; v != s; v = arcs[via[v] ^ 1].to) {
        arcs[via[v]].capacity -= push;
        arcs[via[v] ^ 1].capacity += push;
      }
      total += push;
    }
    return total;
  }

 private:
  static constexpr double kTolerance = 1e-12;

  struct Arc {
    std::size_t to;
    double capacity;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> arcs_;
};

}  // namespace ncplace
