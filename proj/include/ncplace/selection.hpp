#pragma once

// Greedy placement of a budget of NC nodes, with the random baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ncplace/delay_estimator.hpp"
#include "ncplace/topology.hpp"

namespace ncplace::selection {

enum class Strategy { Centralized, Local, Random };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Centralized: return "centralized";
    case Strategy::Local: return "local";
    case Strategy::Random: return "random";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "centralized") return Strategy::Centralized;
  if (s == "local") return Strategy::Local;
  if (s == "random" || s == "randsel") return Strategy::Random;
  return std::nullopt;
}

struct Pick {
  NodeId node = 0;
  double est_delay = 0.0;  // estimated mean client delay after this promotion
};

struct SelectionPlan {
  Strategy strategy = Strategy::Centralized;
  int budget = 0;
  int radius = 0;           // local strategy
  std::uint64_t seed = 0;   // random strategy
  double baseline_delay = 0.0;  // estimated mean client delay before any promotion
  std::vector<Pick> picks;
};

struct SelectionOptions {
  int generation_size = 32;
  /// Stop as soon as no candidate improves the estimate instead of spending
  /// the whole budget.
  bool early_stop = false;
  delay::EstimatorOptions estimator{};
};

inline OverlayGraph promote(OverlayGraph g, NodeId u) {
  if (g.role(u) != Role::SF) throw std::invalid_argument("promote: node " + std::to_string(u) + " is not SF");
  g.set_role(u, Role::NC);
  return g;
}

/// Graph with the first k picks of the plan promoted to NC.
inline OverlayGraph apply(OverlayGraph g, const SelectionPlan& plan, std::size_t k) {
  if (k > plan.picks.size()) throw std::out_of_range("apply: prefix longer than plan");
  for (std::size_t i = 0; i < k; ++i) g.set_role(plan.picks[i].node, Role::NC);
  return g;
}

inline double total_delay(const OverlayGraph& g, const SelectionOptions& o) {
  return delay::estimate(g, o.generation_size, o.estimator).total_delay();
}

inline double mean_delay(const OverlayGraph& g, const SelectionOptions& o) {
  return delay::estimate(g, o.generation_size, o.estimator).mean_delay();
}

/// Each stage promotes the SF node whose promotion minimizes the summed
/// estimated client delay over the whole graph; ties go to the smallest id.
inline SelectionPlan select_centralized(const OverlayGraph& g, int budget, const SelectionOptions& o = {}) {
  SelectionPlan plan;
  plan.strategy = Strategy::Centralized;
  plan.budget = budget;
  OverlayGraph current = g;
  const double clients = static_cast<double>(g.clients().size());
  double current_total = total_delay(current, o);
  plan.baseline_delay = current_total / clients;
  for (int stage = 0; stage < budget; ++stage) {
    const auto candidates = current.sf_nodes();
    if (candidates.empty()) break;
    NodeId best = candidates.front();
    double best_total = std::numeric_limits<double>::infinity();
    bool any = false;
    for (NodeId u : candidates) {
      const double t = total_delay(promote(current, u), o);
      if (!any || t < best_total) {
        best = u;
        best_total = t;
        any = true;
      }
    }
    if (o.early_stop && !(best_total < current_total)) break;
    current.set_role(best, Role::NC);
    current_total = best_total;
    plan.picks.push_back({best, best_total / clients});
  }
  return plan;
}

/// Score of promoting u computed only from its radius-d neighborhood: the
/// drop of the summed client delay inside the neighborhood.
inline double local_benefit(const OverlayGraph& g, NodeId u, int radius, const SelectionOptions& o) {
  const auto sub = neighborhood(g, u, radius);
  if (!sub || !sub->has_node(u) || sub->role(u) != Role::SF) return 0.0;
  const double before = total_delay(*sub, o);
  const double after = total_delay(promote(*sub, u), o);
  if (std::isinf(before) && std::isinf(after)) return 0.0;
  return before - after;
}

/// Like select_centralized, but each candidate is scored on its own
/// neighborhood and a central agent promotes the best score.
inline SelectionPlan select_local(const OverlayGraph& g, int budget, int radius, const SelectionOptions& o = {}) {
  if (radius < 1) throw std::invalid_argument("select_local: radius must be >= 1");
  SelectionPlan plan;
  plan.strategy = Strategy::Local;
  plan.budget = budget;
  plan.radius = radius;
  OverlayGraph current = g;
  plan.baseline_delay = mean_delay(current, o);
  for (int stage = 0; stage < budget; ++stage) {
    const auto candidates = current.sf_nodes();
    if (candidates.empty()) break;
    NodeId best = candidates.front();
    double best_score = -std::numeric_limits<double>::infinity();
    for (NodeId u : candidates) {
      const double s = local_benefit(current, u, radius, o);
      if (s > best_score) {
        best = u;
        best_score = s;
      }
    }
    if (o.early_stop && !(best_score > 0.0)) break;
    current.set_role(best, Role::NC);
    plan.picks.push_back({best, mean_delay(current, o)});
  }
  return plan;
}

/// Uniformly random distinct SF nodes, reproducible per seed.
inline SelectionPlan select_random(const OverlayGraph& g, int budget, std::uint64_t seed,
                                   const SelectionOptions& o = {}) {
  SelectionPlan plan;
  plan.strategy = Strategy::Random;
  plan.budget = budget;
  plan.seed = seed;
  auto candidates = g.sf_nodes();
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(std::max(budget, 0))));
  OverlayGraph current = g;
  plan.baseline_delay = mean_delay(current, o);
  for (NodeId u : candidates) {
    current.set_role(u, Role::NC);
    plan.picks.push_back({u, mean_delay(current, o)});
  }
  return plan;
}

inline void write_csv(std::ostream& os, const SelectionPlan& plan, bool header = true) {
  if (header) os << "rank,node_id,est_delay_seconds,strategy,radius,seed\n";
  os.precision(10);
  for (std::size_t i = 0; i < plan.picks.size(); ++i)
    os << i + 1 << ',' << plan.picks[i].node << ',' << plan.picks[i].est_delay << ',' << to_string(plan.strategy) << ','
       << plan.radius << ',' << plan.seed << '\n';
}

}  // namespace ncplace::selection
