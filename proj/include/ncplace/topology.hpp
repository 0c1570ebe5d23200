#pragma once

// Overlay graph model: node roles, lossy capacity-limited edges, random
// generation, pruning, neighborhoods with proxy endpoints, max-flow bounds
// and the line-oriented topology file format.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ncplace/maxflow.hpp"

namespace ncplace {

using NodeId = int;

enum class Role { Source, Client, SF, NC };

inline constexpr int kDefaultBufferCapacity = 16;

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::Source: return "source";
    case Role::Client: return "client";
    case Role::SF: return "sf";
    case Role::NC: return "nc";
  }
  return "?";
}

inline std::optional<Role> parse_role(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "source") return Role::Source;
  if (lower == "client") return Role::Client;
  if (lower == "sf") return Role::SF;
  if (lower == "nc") return Role::NC;
  return std::nullopt;
}

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeRecord {
  NodeId id = 0;
  Role role = Role::SF;
  int buffer_capacity = kDefaultBufferCapacity;

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct EdgeRecord {
  NodeId from = 0;
  NodeId to = 0;
  double bandwidth = 0.0;  // packets per second
  double loss = 0.0;       // per-transmission loss probability in [0,1)

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

/// Directed acyclic overlay. Nodes are addressed by id; edges by their index
/// in `edges()`, which also serves as the deterministic tie-break order.
class OverlayGraph {
 public:
  OverlayGraph() = default;

  void add_node(NodeRecord n) {
    if (index_.count(n.id)) throw TopologyError("duplicate node id " + std::to_string(n.id));
    if (n.id < 0) throw TopologyError("node ids must be non-negative");
    if (n.buffer_capacity < 1) throw TopologyError("node " + std::to_string(n.id) + ": buffer capacity must be >= 1");
    index_[n.id] = nodes_.size();
    nodes_.push_back(n);
    out_.emplace_back();
    in_.emplace_back();
  }

  void add_edge(EdgeRecord e) {
    if (!has_node(e.from) || !has_node(e.to))
      throw TopologyError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " references unknown node");
    if (e.from == e.to) throw TopologyError("self loop on node " + std::to_string(e.from));
    if (!(e.bandwidth > 0.0) || !std::isfinite(e.bandwidth))
      throw TopologyError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + ": bandwidth must be positive");
    if (!(e.loss >= 0.0 && e.loss < 1.0))
      throw TopologyError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + ": loss must be in [0,1)");
    out_[index_.at(e.from)].push_back(edges_.size());
    in_[index_.at(e.to)].push_back(edges_.size());
    edges_.push_back(e);
  }

  bool has_node(NodeId id) const { return index_.count(id) != 0; }
  std::size_t index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw TopologyError("unknown node " + std::to_string(id));
    return it->second;
  }

  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  const NodeRecord& node(NodeId id) const { return nodes_[index_of(id)]; }
  std::size_t node_count() const { return nodes_.size(); }

  const std::vector<std::size_t>& out_edges(NodeId id) const { return out_[index_of(id)]; }
  const std::vector<std::size_t>& in_edges(NodeId id) const { return in_[index_of(id)]; }

  Role role(NodeId id) const { return node(id).role; }
  void set_role(NodeId id, Role r) { nodes_[index_of(id)].role = r; }

  double out_bandwidth(NodeId id) const {
    double s = 0.0;
    for (auto e : out_edges(id)) s += edges_[e].bandwidth;
    return s;
  }
  double in_bandwidth(NodeId id) const {
    double s = 0.0;
    for (auto e : in_edges(id)) s += edges_[e].bandwidth;
    return s;
  }

  std::vector<NodeId> with_role(Role r) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
      if (n.role == r) out.push_back(n.id);
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<NodeId> sources() const { return with_role(Role::Source); }
  std::vector<NodeId> clients() const { return with_role(Role::Client); }
  std::vector<NodeId> sf_nodes() const { return with_role(Role::SF); }
  std::vector<NodeId> nc_nodes() const { return with_role(Role::NC); }

  std::vector<NodeId> children(NodeId id) const {
    std::vector<NodeId> out;
    for (auto e : out_edges(id)) out.push_back(edges_[e].to);
    return out;
  }
  std::vector<NodeId> parents(NodeId id) const {
    std::vector<NodeId> out;
    for (auto e : in_edges(id)) out.push_back(edges_[e].from);
    return out;
  }

  /// Kahn's algorithm, smallest id first among ready nodes. Throws on cycles.
  std::vector<NodeId> topological_order() const {
    std::vector<std::size_t> indeg(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) indeg[i] = in_[i].size();
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (indeg[i] == 0) ready.push(nodes_[i].id);
    std::vector<NodeId> order;
    while (!ready.empty()) {
      const NodeId id = ready.top();
      ready.pop();
      order.push_back(id);
      for (auto e : out_edges(id)) {
        const auto j = index_of(edges_[e].to);
        if (--indeg[j] == 0) ready.push(edges_[e].to);
      }
    }
    if (order.size() != nodes_.size()) throw TopologyError("graph contains a cycle");
    return order;
  }

  /// Checks the structural invariants; throws TopologyError on violation.
  void validate() const {
    topological_order();
    for (const auto& n : nodes_) {
      if (n.role == Role::Source && !in_edges(n.id).empty())
        throw TopologyError("source " + std::to_string(n.id) + " has incoming edges");
      if (n.role == Role::Client && !out_edges(n.id).empty())
        throw TopologyError("client " + std::to_string(n.id) + " has outgoing edges");
    }
  }

  /// Copy without `id` and its incident edges.
  OverlayGraph without_node(NodeId id) const {
    OverlayGraph g;
    for (const auto& n : nodes_)
      if (n.id != id) g.add_node(n);
    for (const auto& e : edges_)
      if (e.from != id && e.to != id) g.add_edge(e);
    return g;
  }

  /// Induced subgraph on `keep`.
  OverlayGraph induced(const std::set<NodeId>& keep) const {
    OverlayGraph g;
    for (const auto& n : nodes_)
      if (keep.count(n.id)) g.add_node(n);
    for (const auto& e : edges_)
      if (keep.count(e.from) && keep.count(e.to)) g.add_edge(e);
    return g;
  }

  friend bool operator==(const OverlayGraph& a, const OverlayGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<NodeRecord> nodes_;
  std::vector<EdgeRecord> edges_;
  std::map<NodeId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

// ---------------------------------------------------------------------------
// Reachability and pruning

inline std::set<NodeId> reachable_from(const OverlayGraph& g, const std::vector<NodeId>& starts, bool forward) {
  std::set<NodeId> seen(starts.begin(), starts.end());
  std::vector<NodeId> stack(starts.begin(), starts.end());
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    for (NodeId v : forward ? g.children(u) : g.parents(u))
      if (seen.insert(v).second) stack.push_back(v);
  }
  return seen;
}

/// Nodes on some source -> client path. Returns nullopt when no such path.
inline std::optional<OverlayGraph> try_prune(const OverlayGraph& g) {
  const auto down = reachable_from(g, g.sources(), true);
  const auto up = reachable_from(g, g.clients(), false);
  std::set<NodeId> keep;
  for (NodeId id : down)
    if (up.count(id)) keep.insert(id);
  OverlayGraph out = g.induced(keep);
  if (out.sources().empty() || out.clients().empty()) return std::nullopt;
  return out;
}

inline OverlayGraph prune(const OverlayGraph& g) {
  auto out = try_prune(g);
  if (!out) throw TopologyError("prune: no source-to-client path");
  return *out;
}

// ---------------------------------------------------------------------------
// Random generation

/// Pairwise bandwidth matrix standing in for a measured overlay snapshot.
/// Zero entries mark host pairs that are not adjacent.
struct TraceMatrix {
  std::vector<std::vector<double>> bandwidth;
  std::size_t hosts() const { return bandwidth.size(); }
};

/// Format: first token n, then n*n bandwidth values row-major. `#` comments.
inline TraceMatrix load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open trace file " + path);
  std::stringstream clean;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    clean << line << '\n';
  }
  std::size_t n = 0;
  if (!(clean >> n) || n == 0) throw TopologyError(path + ": missing host count");
  TraceMatrix t;
  t.bandwidth.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(clean >> t.bandwidth[i][j]) || t.bandwidth[i][j] < 0.0)
        throw TopologyError(path + ": bad bandwidth entry at row " + std::to_string(i + 1) + ", column " +
                            std::to_string(j + 1));
  return t;
}

struct GenerateParams {
  int n_nodes = 40;
  int n_sources = 1;
  int n_clients = 3;
  int parents_per_node = 4;
  double loss_rate = 0.05;
  int buffer_capacity = kDefaultBufferCapacity;
  /// Host pool; 0 means every node is a fresh host.
  int host_pool = 0;
  /// Whether host `parent` may feed host `child`. Empty means permissive.
  std::function<bool(int parent, int child)> adjacency;
  /// Without an explicit predicate, each host pair is linked independently
  /// with this probability (a stand-in for a sparse measurement snapshot).
  double link_probability = 1.0;
  /// Edge bandwidth in packets/second for a host pair.
  std::function<double(std::mt19937_64&, int parent, int child)> bandwidth;
  int max_rejections = 10000;
};

/// Default bandwidth sampler: log-uniform between lo and hi packets/second.
inline std::function<double(std::mt19937_64&, int, int)> log_uniform_bandwidth(double lo, double hi) {
  return [lo, hi](std::mt19937_64& rng, int, int) {
    std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
    return std::exp(d(rng));
  };
}

/// Adjacency and bandwidth taken from a trace, scaled by `scale`.
inline void use_trace(GenerateParams& p, const TraceMatrix& t, double scale) {
  auto shared = std::make_shared<TraceMatrix>(t);
  p.host_pool = static_cast<int>(t.hosts());
  p.adjacency = [shared](int a, int b) { return shared->bandwidth[a][b] > 0.0; };
  p.bandwidth = [shared, scale](std::mt19937_64&, int a, int b) { return shared->bandwidth[a][b] * scale; };
}

/// Sources first, then relays one by one with up to `parents_per_node`
/// random parents; a relay none of whose drawn parents may feed it is
/// discarded and redrawn. Clients are attached last with the same rule,
/// drawing parents among relays. Finally pruned to source->client paths.
inline OverlayGraph generate(const GenerateParams& p, std::uint64_t seed) {
  if (p.n_sources < 1 || p.n_clients < 1) throw std::invalid_argument("generate: need at least one source and client");
  if (p.n_nodes < p.n_sources + p.n_clients) throw std::invalid_argument("generate: n_nodes < sources + clients");
  if (p.parents_per_node < 1) throw std::invalid_argument("generate: parents_per_node must be >= 1");
  if (p.host_pool > 0 && p.host_pool < p.n_nodes) throw std::invalid_argument("generate: host pool smaller than n_nodes");

  std::mt19937_64 rng(seed);
  std::function<bool(int, int)> adjacency = p.adjacency;
  if (!adjacency && p.link_probability < 1.0) {
    const std::uint64_t salt = rng();
    const double q = p.link_probability;
    adjacency = [salt, q](int a, int b) {
      std::uint64_t z = salt ^ (static_cast<std::uint64_t>(a) << 32 | static_cast<std::uint32_t>(b));
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      z ^= z >> 31;
      return static_cast<double>(z >> 11) * 0x1.0p-53 < q;
    };
  }
  auto bw = p.bandwidth ? p.bandwidth : log_uniform_bandwidth(8.0, 64.0);

  OverlayGraph g;
  std::vector<int> host;  // host per node id
  std::vector<int> free_hosts;
  if (p.host_pool > 0)
    for (int h = 0; h < p.host_pool; ++h) free_hosts.push_back(h);
  int next_host = 0;
  auto draw_host = [&]() -> int {
    if (p.host_pool == 0) return next_host++;
    std::uniform_int_distribution<std::size_t> d(0, free_hosts.size() - 1);
    const auto i = d(rng);
    return free_hosts[i];
  };
  auto take_host = [&](int h) {
    if (p.host_pool > 0) free_hosts.erase(std::find(free_hosts.begin(), free_hosts.end(), h));
    host.push_back(h);
  };

  std::vector<NodeId> upstream;  // eligible parents for relays
  std::vector<NodeId> relays;
  for (int s = 0; s < p.n_sources; ++s) {
    const NodeId id = static_cast<NodeId>(host.size());
    take_host(draw_host());
    g.add_node({id, Role::Source, p.buffer_capacity});
    upstream.push_back(id);
  }

  int rejections = 0;
  auto attach = [&](Role role, const std::vector<NodeId>& pool) {
    for (;;) {
      if (p.host_pool > 0 && free_hosts.empty()) throw TopologyError("generate: host pool exhausted");
      const int h = draw_host();
      std::vector<NodeId> candidates = pool;
      std::shuffle(candidates.begin(), candidates.end(), rng);
      candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(p.parents_per_node)));
      std::sort(candidates.begin(), candidates.end());
      std::vector<NodeId> linked;
      for (NodeId par : candidates)
        if (!adjacency || adjacency(host[static_cast<std::size_t>(par)], h)) linked.push_back(par);
      if (linked.empty()) {
        if (p.host_pool > 0) free_hosts.erase(std::find(free_hosts.begin(), free_hosts.end(), h));
        if (++rejections > p.max_rejections) throw TopologyError("generate: too many rejected nodes (adjacency too sparse)");
        continue;
      }
      const NodeId id = static_cast<NodeId>(host.size());
      take_host(h);
      g.add_node({id, role, p.buffer_capacity});
      for (NodeId par : linked)
        g.add_edge({par, id, bw(rng, host[static_cast<std::size_t>(par)], h), p.loss_rate});
      return id;
    }
  };

  const int n_relays = p.n_nodes - p.n_sources - p.n_clients;
  for (int i = 0; i < n_relays; ++i) {
    const NodeId id = attach(Role::SF, upstream);
    upstream.push_back(id);
    relays.push_back(id);
  }
  for (int i = 0; i < p.n_clients; ++i) attach(Role::Client, relays.empty() ? upstream : relays);

  return prune(g);
}

/// Graphs whose pruned size falls in [min_nodes, max_nodes], drawn from
/// consecutive derived seeds. Deterministic for a fixed base seed.
inline std::vector<OverlayGraph> generate_corpus(const GenerateParams& p, std::size_t count, std::uint64_t seed,
                                                 std::size_t min_nodes = 0,
                                                 std::size_t max_nodes = std::numeric_limits<std::size_t>::max(),
                                                 int max_attempts = 1000) {
  std::vector<OverlayGraph> out;
  std::uint64_t attempt = 0;
  int misses = 0;
  while (out.size() < count) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * ++attempt;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    std::optional<OverlayGraph> g;
    try {
      g = generate(p, z);
    } catch (const TopologyError&) {
    }
    if (g && g->node_count() >= min_nodes && g->node_count() <= max_nodes) {
      out.push_back(std::move(*g));
      misses = 0;
    } else if (++misses > max_attempts) {
      throw TopologyError("generate_corpus: no graph within the size range after " + std::to_string(max_attempts) +
                          " attempts");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Max-flow bounds

enum class FlowMode { Routing, NetworkCoding };

/// Edge capacities are erasure capacities b*(1-loss). Hyper-source and
/// hyper-sink links are lossless with infinite capacity.
inline double max_flow_bound(const OverlayGraph& g, FlowMode mode) {
  const std::size_t n = g.node_count();
  const std::size_t hyper_source = n;
  const std::size_t hyper_sink = n + 1;
  FlowNetwork net(n + 2);
  for (const auto& e : g.edges()) net.add_edge(g.index_of(e.from), g.index_of(e.to), e.bandwidth * (1.0 - e.loss));
  for (NodeId s : g.sources()) net.add_edge(hyper_source, g.index_of(s), FlowNetwork::kInfinity);
  if (mode == FlowMode::NetworkCoding) {
    double total = 0.0;
    for (NodeId c : g.clients()) total += net.max_flow(hyper_source, g.index_of(c));
    return total;
  }
  for (NodeId c : g.clients()) net.add_edge(g.index_of(c), hyper_sink, FlowNetwork::kInfinity);
  return net.max_flow(hyper_source, hyper_sink);
}

// ---------------------------------------------------------------------------
// Neighborhoods

/// Undirected hop distances from u (unreached nodes are absent).
inline std::map<NodeId, int> hop_distances(const OverlayGraph& g, NodeId u) {
  std::map<NodeId, int> dist{{u, 0}};
  std::queue<NodeId> q;
  q.push(u);
  while (!q.empty()) {
    const NodeId x = q.front();
    q.pop();
    auto visit = [&](NodeId y) {
      if (dist.emplace(y, dist[x] + 1).second) q.push(y);
    };
    for (NodeId y : g.children(x)) visit(y);
    for (NodeId y : g.parents(x)) visit(y);
  }
  return dist;
}

/// Largest undirected hop distance between two connected nodes.
inline int diameter(const OverlayGraph& g) {
  int best = 0;
  for (const auto& n : g.nodes())
    for (const auto& [id, d] : hop_distances(g, n.id)) best = std::max(best, d);
  return best;
}

/// Subgraph of nodes within `radius` undirected hops of u. Nodes with parents
/// outside the ball become proxy sources whose outgoing bandwidth is capped
/// by their true incoming bandwidth; other nodes with children outside the
/// ball become proxy clients. The result is pruned to source->client paths;
/// nullopt when nothing survives.
inline std::optional<OverlayGraph> neighborhood(const OverlayGraph& g, NodeId u, int radius) {
  std::set<NodeId> ball;
  for (const auto& [id, d] : hop_distances(g, u))
    if (d <= radius) ball.insert(id);

  std::set<NodeId> proxy_sources;
  std::set<NodeId> proxy_clients;
  for (NodeId id : ball) {
    if (id == u || g.role(id) == Role::Client) continue;
    bool ext_parent = false;
    bool ext_child = false;
    for (NodeId p : g.parents(id)) ext_parent |= !ball.count(p);
    for (NodeId c : g.children(id)) ext_child |= !ball.count(c);
    if (ext_parent) proxy_sources.insert(id);
    else if (ext_child && g.role(id) != Role::Source) proxy_clients.insert(id);
  }

  OverlayGraph sub;
  for (NodeId id : ball) {
    NodeRecord n = g.node(id);
    if (proxy_sources.count(id)) n.role = Role::Source;
    if (proxy_clients.count(id)) n.role = Role::Client;
    sub.add_node(n);
  }
  for (const auto& e : g.edges()) {
    if (!ball.count(e.from) || !ball.count(e.to)) continue;
    if (proxy_sources.count(e.to) || proxy_clients.count(e.from)) continue;
    EdgeRecord edge = e;
    if (proxy_sources.count(e.from)) {
      const double bo = g.out_bandwidth(e.from);
      const double bi = g.in_bandwidth(e.from);
      if (bo > bi) edge.bandwidth *= bi / bo;
    }
    sub.add_edge(edge);
  }
  return try_prune(sub);
}

// ---------------------------------------------------------------------------
// Processing order

/// NC nodes in a topological order (upstream NC nodes before their NC
/// descendants), smallest id first among ready nodes.
inline std::vector<NodeId> nc_processing_order(const OverlayGraph& g) {
  std::vector<NodeId> out;
  for (NodeId id : g.topological_order())
    if (g.role(id) == Role::NC) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------
// File I/O
//
//   node <id> <role> <h>
//   edge <from> <to> <bandwidth_pps> <loss>
//   # comment

inline void write_topology(std::ostream& os, const OverlayGraph& g) {
  os << std::setprecision(17);
  for (const auto& n : g.nodes()) os << "node " << n.id << ' ' << to_string(n.role) << ' ' << n.buffer_capacity << '\n';
  for (const auto& e : g.edges()) os << "edge " << e.from << ' ' << e.to << ' ' << e.bandwidth << ' ' << e.loss << '\n';
}

inline OverlayGraph read_topology(std::istream& is, const std::string& origin = "<stream>") {
  OverlayGraph g;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& field, const std::string& what) -> TopologyError {
    return TopologyError(origin + ":" + std::to_string(lineno) + ": field '" + field + "': " + what);
  };
  auto parse_int = [&](const std::string& tok, const std::string& field) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      throw fail(field, "expected an integer, got '" + tok + "'");
    }
    if (used != tok.size()) throw fail(field, "expected an integer, got '" + tok + "'");
    return static_cast<int>(v);
  };
  auto parse_real = [&](const std::string& tok, const std::string& field) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw fail(field, "expected a number, got '" + tok + "'");
    }
    if (used != tok.size()) throw fail(field, "expected a number, got '" + tok + "'");
    return v;
  };

  while (std::getline(is, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ss(line);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    try {
      if (tok[0] == "node") {
        if (tok.size() != 4) throw fail("node", "expected 'node <id> <role> <h>'");
        const auto role = parse_role(tok[2]);
        if (!role) throw fail("role", "unknown role '" + tok[2] + "'");
        const int h = parse_int(tok[3], "h");
        if (h < 1) throw fail("h", "buffer capacity must be >= 1");
        g.add_node({parse_int(tok[1], "id"), *role, h});
      } else if (tok[0] == "edge") {
        if (tok.size() != 5) throw fail("edge", "expected 'edge <from> <to> <bandwidth_pps> <loss>'");
        const double bw = parse_real(tok[3], "bandwidth_pps");
        const double loss = parse_real(tok[4], "loss");
        if (!(bw > 0.0)) throw fail("bandwidth_pps", "must be positive");
        if (!(loss >= 0.0 && loss < 1.0)) throw fail("loss", "must be in [0,1)");
        g.add_edge({parse_int(tok[1], "from"), parse_int(tok[2], "to"), bw, loss});
      } else {
        throw fail("record", "unknown record type '" + tok[0] + "'");
      }
    } catch (const TopologyError& e) {
      const std::string msg = e.what();
      if (msg.rfind(origin + ":", 0) == 0) throw;
      throw TopologyError(origin + ":" + std::to_string(lineno) + ": " + msg);
    }
  }
  try {
    g.validate();
  } catch (const TopologyError& e) {
    throw TopologyError(origin + ": " + e.what());
  }
  return g;
}

inline void save(const OverlayGraph& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw TopologyError("cannot write " + path);
  write_topology(os, g);
}

inline OverlayGraph load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw TopologyError("cannot open " + path);
  return read_topology(is, path);
}

}  // namespace ncplace
