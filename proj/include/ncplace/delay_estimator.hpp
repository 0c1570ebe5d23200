#pragma once

// Analytic per-client decoding delay. Every source and NC node is treated as
// an independent sender whose packets travel over the subgraph that avoids
// other NC nodes; per-sender delays are combined as parallel rates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncplace/buffer_model.hpp"
#include "ncplace/topology.hpp"

namespace ncplace::delay {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Arrival and rank-growth model of a single sender

/// Probability mass of k arrivals out of nu transmissions, each lost with
/// probability eps. Non-integer nu interpolates linearly between the two
/// nearest integer counts; nu below 1 is clamped to 1.
inline std::vector<double> arrival_pmf_capped(double nu, double eps, long kmax);

inline std::vector<double> arrival_pmf(double nu, double eps) {
  return arrival_pmf_capped(nu, eps, std::numeric_limits<long>::max());
}

/// Same pmf with every count >= kmax lumped into entry kmax. The rank
/// recursion never distinguishes batches larger than G, so it only needs
/// this truncated form, which stays cheap for very large nu.
inline std::vector<double> arrival_pmf_capped(double nu, double eps, long kmax) {
  nu = std::max(1.0, nu);
  if (kmax < 1) throw std::invalid_argument("arrival_pmf_capped: kmax must be >= 1");
  const double lo = std::floor(nu);
  const double hi = std::ceil(nu);
  const double w_hi = nu - lo;
  const auto width = static_cast<std::size_t>(std::min<double>(hi, static_cast<double>(kmax))) + 1;
  auto binom = [eps, width](double n) {
    std::vector<double> pmf(width, 0.0);
    const std::size_t top = std::min<std::size_t>(width - 1, static_cast<std::size_t>(std::min<double>(n, width - 1)));
    if (eps <= 0.0) {
      pmf[top] = 1.0;
      return pmf;
    }
    if (eps >= 1.0) {
      pmf[0] = 1.0;
      return pmf;
    }
    const double log_ok = std::log1p(-eps);
    const double log_lost = std::log(eps);
    double below = 0.0;
    for (std::size_t k = 0; k <= top; ++k) {
      const double kk = static_cast<double>(k);
      const double log_choose = std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0);
      pmf[k] = std::exp(log_choose + kk * log_ok + (n - kk) * log_lost);
      if (k < top) below += pmf[k];
    }
    if (static_cast<double>(top) < n) pmf[top] = std::max(0.0, 1.0 - below);
    return pmf;
  };
  std::vector<double> out = binom(hi);
  if (hi != lo) {
    const auto low = binom(lo);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (1.0 - w_hi) * low[k] + w_hi * out[k];
  }
  return out;
}

inline double arrival_pmf(double nu, double eps, int k) {
  const auto pmf = arrival_pmf(nu, eps);
  return k >= 0 && static_cast<std::size_t>(k) < pmf.size() ? pmf[static_cast<std::size_t>(k)] : 0.0;
}

/// P[n][r]: probability the client holds rank r once the sender has received
/// n useful packets (the sender's own rank is min(n, G)). first_passage[n][r]:
/// probability the client's rank reaches r exactly at step n.
struct RankTables {
  int generation_size = 0;
  std::vector<std::vector<double>> rank;
  std::vector<std::vector<double>> first_passage;

  double P(int r, int n) const { return rank[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)]; }
  double first(int r, int n) const {
    return first_passage[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)];
  }
};

namespace detail {

/// One step of the recursion: the sender receives useful packet n and emits
/// a batch; `tail[k]` is the probability of at least k arrivals.
inline void rank_step(std::span<const double> prev, std::span<double> next, std::span<const double> pmf,
                      std::span<const double> tail, int n, int g, std::span<double> first) {
  const int cap = std::min(n, g);
  const int kmax = static_cast<int>(pmf.size()) - 1;
  std::fill(next.begin(), next.end(), 0.0);
  for (int r = 0; r < cap; ++r) {
    double s = 0.0;
    for (int k = 0; k <= std::min(r, kmax); ++k) s += prev[static_cast<std::size_t>(r - k)] * pmf[static_cast<std::size_t>(k)];
    next[static_cast<std::size_t>(r)] = s;
  }
  double at_cap = prev[static_cast<std::size_t>(cap)];
  for (int k = 1; k <= cap; ++k) {
    const double t = k <= kmax ? tail[static_cast<std::size_t>(k)] : 0.0;
    at_cap += prev[static_cast<std::size_t>(cap - k)] * t;
  }
  next[static_cast<std::size_t>(cap)] = at_cap;
  if (!first.empty()) {
    std::fill(first.begin(), first.end(), 0.0);
    for (int r = 1; r <= cap; ++r) {
      double s = 0.0;
      for (int k = 1; k <= std::min(r, kmax); ++k) s += prev[static_cast<std::size_t>(r - k)] * tail[static_cast<std::size_t>(k)];
      first[static_cast<std::size_t>(r)] = s;
    }
  }
}

inline std::vector<double> tail_of(const std::vector<double>& pmf) {
  std::vector<double> tail(pmf.size() + 1, 0.0);
  for (std::size_t k = pmf.size(); k-- > 0;) tail[k] = tail[k + 1] + pmf[k];
  tail.pop_back();
  return tail;
}

}  // namespace detail

inline RankTables rank_recursion(double nu, double eps, int g, int n_max) {
  if (g < 1) throw std::invalid_argument("rank_recursion: G must be >= 1");
  if (n_max < g) throw std::invalid_argument("rank_recursion: n_max must be >= G");
  const auto pmf = arrival_pmf_capped(nu, eps, g);
  const auto tail = detail::tail_of(pmf);
  RankTables t;
  t.generation_size = g;
  const auto width = static_cast<std::size_t>(g) + 1;
  t.rank.assign(static_cast<std::size_t>(n_max) + 1, std::vector<double>(width, 0.0));
  t.first_passage.assign(static_cast<std::size_t>(n_max) + 1, std::vector<double>(width, 0.0));
  t.rank[0][0] = 1.0;
  for (int n = 1; n <= n_max; ++n)
    detail::rank_step(t.rank[static_cast<std::size_t>(n - 1)], t.rank[static_cast<std::size_t>(n)], pmf, tail, n, g,
                      t.first_passage[static_cast<std::size_t>(n)]);
  return t;
}

struct TruncationPolicy {
  double mass = 1e-9;       // stop once the first-passage mass reaches 1 - mass
  int cap_factor = 50;      // ... or after cap_factor * G steps
  double min_mass = 0.999;  // below this at the cap the sum is declared divergent
};

/// Expected number of useful packets the sender must receive before the
/// client reaches rank G, from a precomputed table.
inline double expected_sources(const RankTables& t, int g, TruncationPolicy policy = {}) {
  double mass = 0.0;
  double sum = 0.0;
  for (std::size_t n = static_cast<std::size_t>(g); n < t.first_passage.size(); ++n) {
    const double p = t.first_passage[n][static_cast<std::size_t>(g)];
    mass += p;
    sum += static_cast<double>(n) * p;
    if (mass >= 1.0 - policy.mass) return sum;
  }
  if (mass < policy.min_mass) throw DivergenceError("expected_sources: first-passage mass did not accumulate");
  return sum;
}

/// Same quantity, running the recursion only as far as needed.
inline double expected_sources(double nu, double eps, int g, TruncationPolicy policy = {}) {
  if (g < 1) throw std::invalid_argument("expected_sources: G must be >= 1");
  const auto pmf = arrival_pmf_capped(nu, eps, g);
  const auto tail = detail::tail_of(pmf);
  const auto width = static_cast<std::size_t>(g) + 1;
  std::vector<double> prev(width, 0.0);
  std::vector<double> next(width, 0.0);
  prev[0] = 1.0;
  double mass = 0.0;
  double sum = 0.0;
  const int n_max = policy.cap_factor * g;
  for (int n = 1; n <= n_max; ++n) {
    detail::rank_step(prev, next, pmf, tail, n, g, {});
    if (n >= g) {
      // first passage into G at step n is the newly absorbed mass
      const double p = next[static_cast<std::size_t>(g)] - prev[static_cast<std::size_t>(g)];
      mass += p;
      sum += n * p;
      if (mass >= 1.0 - policy.mass) return sum;
    }
    std::swap(prev, next);
  }
  if (mass < policy.min_mass) throw DivergenceError("expected_sources: first-passage mass did not accumulate");
  return sum;
}

enum class SenderMode { Auto, RateLimited, OverProvisioned };

/// Delay for a client fed by a single sender with useful input rate
/// `useful_rate`, outgoing bandwidth `b_out` and loss `eps` towards the
/// client. Over-provisioned senders deliver G/(b_out (1 - eps)); rate-limited
/// ones need E/useful_rate where E comes from the rank recursion with
/// nu = b_out / useful_rate.
inline double single_node_delay(double useful_rate, double b_out, double eps, int g,
                                SenderMode mode = SenderMode::Auto, TruncationPolicy policy = {}) {
  if (!(useful_rate > 0.0) || !(b_out > 0.0) || eps >= 1.0) return kInfinity;
  const double over = g / (b_out * (1.0 - eps));
  if (mode == SenderMode::OverProvisioned || (mode == SenderMode::Auto && useful_rate >= b_out)) return over;
  const double nu = b_out / useful_rate;
  try {
    return expected_sources(nu, eps, g, policy) / useful_rate;
  } catch (const DivergenceError&) {
    // Far below one delivered packet per useful arrival the recursion needs
    // more steps than the cap; the fluid limit applies there.
    return over;
  }
}

// ---------------------------------------------------------------------------
// Loss probabilities

/// Index-based snapshot of a graph with per-node role overrides and an
/// optional silenced node. Silencing removes the node and its edges, so its
/// parents no longer count it in their outgoing bandwidth or routing split.
class NetworkView {
 public:
  struct Arc {
    std::size_t from;
    std::size_t to;
    double bandwidth;
    double loss;
  };

  explicit NetworkView(const OverlayGraph& g) {
    for (const auto& n : g.nodes()) {
      ids_.push_back(n.id);
      roles_.push_back(n.role);
      buffers_.push_back(n.buffer_capacity);
    }
    out_.resize(ids_.size());
    in_.resize(ids_.size());
    for (const auto& e : g.edges()) {
      const auto a = arcs_.size();
      arcs_.push_back({g.index_of(e.from), g.index_of(e.to), e.bandwidth, e.loss});
      out_[arcs_[a].from].push_back(a);
      in_[arcs_[a].to].push_back(a);
    }
    for (NodeId id : g.topological_order()) topo_.push_back(g.index_of(id));
    for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = i;
  }

  std::size_t size() const { return ids_.size(); }
  NodeId id(std::size_t i) const { return ids_[i]; }
  std::size_t index(NodeId id) const { return index_.at(id); }
  Role role(std::size_t i) const { return roles_[i]; }
  int buffer(std::size_t i) const { return buffers_[i]; }
  const std::vector<std::size_t>& topo() const { return topo_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<std::size_t>& out(std::size_t i) const { return out_[i]; }
  const std::vector<std::size_t>& in(std::size_t i) const { return in_[i]; }

 private:
  std::vector<NodeId> ids_;
  std::vector<Role> roles_;
  std::vector<int> buffers_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::vector<std::size_t> topo_;
  std::map<NodeId, std::size_t> index_;
};

/// Roles in effect for one evaluation plus an optional silenced node.
struct Configuration {
  std::vector<Role> roles;
  std::size_t silent = static_cast<std::size_t>(-1);

  bool active(std::size_t i) const { return i != silent; }
};

struct LossMap {
  std::vector<double> eps;    // loss towards the client of a packet sent by node i
  std::vector<double> rhat;   // equivalent replication at SF nodes (1 elsewhere)
  std::vector<double> b_out;  // over active edges
  std::vector<double> b_in;
};

/// How SF replication is evaluated inside the loss recursion.
struct ReplicationPolicy {
  /// Per-generation packet horizon in seconds (max client delay of the
  /// previous pass); <= 0 or infinite selects the plain ratio b_o/b_i.
  double horizon = 0.0;
  /// Optional fixed R-hat per node index (NaN entries fall through).
  const std::vector<double>* fixed = nullptr;
};

inline LossMap compute_losses(const NetworkView& net, const Configuration& cfg, std::size_t client,
                              const ReplicationPolicy& rep) {
  const std::size_t n = net.size();
  LossMap m;
  m.eps.assign(n, 1.0);
  m.rhat.assign(n, 1.0);
  m.b_out.assign(n, 0.0);
  m.b_in.assign(n, 0.0);
  for (const auto& a : net.arcs()) {
    if (!cfg.active(a.from) || !cfg.active(a.to)) continue;
    m.b_out[a.from] += a.bandwidth;
    m.b_in[a.to] += a.bandwidth;
  }
  auto beta = [&](std::size_t w) {
    if (cfg.roles[w] != Role::SF || !(m.b_in[w] > 0.0)) return 0.0;
    return buffer::drop_probability(m.b_out[w], m.b_in[w]);
  };
  auto relay = [&](std::size_t w) {
    if (w == client) return 0.0;
    if (cfg.roles[w] != Role::SF) return 1.0;
    return std::pow(m.eps[w], m.rhat[w]);
  };
  const auto& topo = net.topo();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::size_t v = *it;
    if (!cfg.active(v)) continue;
    if (v == client) {
      m.eps[v] = 0.0;
      continue;
    }
    if (cfg.roles[v] == Role::Client || !(m.b_out[v] > 0.0)) {
      m.eps[v] = 1.0;
    } else {
      double e = 0.0;
      for (auto ai : net.out(v)) {
        const auto& a = net.arcs()[ai];
        if (!cfg.active(a.to)) continue;
        const double rho = a.bandwidth / m.b_out[v];
        const double b = beta(a.to);
        e += rho * (a.loss + (1.0 - a.loss) * b + (1.0 - a.loss) * (1.0 - b) * relay(a.to));
      }
      m.eps[v] = std::clamp(e, 0.0, 1.0);
    }
    if (cfg.roles[v] == Role::SF && m.b_in[v] > 0.0) {
      double r = std::numeric_limits<double>::quiet_NaN();
      if (rep.fixed != nullptr) r = (*rep.fixed)[v];
      if (std::isnan(r)) {
        const double ratio = m.b_out[v] / m.b_in[v];
        if (ratio <= 1.0) {
          r = 1.0;
        } else if (rep.horizon > 0.0 && std::isfinite(rep.horizon)) {
          // interpolate over the packet count so R-hat is continuous in the horizon
          const double x = std::max(1.0, m.b_in[v] * rep.horizon);
          const long lo = static_cast<long>(std::floor(x));
          const double f = x - static_cast<double>(lo);
          r = buffer::equivalent_replication(net.buffer(v), ratio, lo, m.eps[v]);
          if (f > 0.0) r += f * (buffer::equivalent_replication(net.buffer(v), ratio, lo + 1, m.eps[v]) - r);
        } else {
          r = ratio;
        }
      }
      m.rhat[v] = r;
    }
  }
  return m;
}

/// Loss probability from u to c given explicit R-hat values for SF nodes
/// (nodes missing from the map use b_o/b_i). Other NC nodes absorb packets.
inline double loss_probability(const OverlayGraph& g, NodeId u, NodeId c, const std::map<NodeId, double>& rhat) {
  NetworkView net(g);
  Configuration cfg;
  for (std::size_t i = 0; i < net.size(); ++i) cfg.roles.push_back(net.role(i));
  std::vector<double> fixed(net.size(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& [id, r] : rhat) fixed[net.index(id)] = r;
  ReplicationPolicy rep;
  rep.fixed = &fixed;
  return compute_losses(net, cfg, net.index(c), rep).eps[net.index(u)];
}

// ---------------------------------------------------------------------------
// Full estimator

struct EstimatorOptions {
  int max_iterations = 20;
  double tolerance = 1e-4;  // max relative change of any client delay
  TruncationPolicy truncation{};
};

struct SenderEstimate {
  NodeId node = 0;
  NodeId client = 0;
  Role role = Role::Source;
  double eps = 1.0;          // loss towards the client
  double useful_rate = 0.0;  // N_c(u)
  double delta_rate = 0.0;   // rate the node carries to the client in SF mode (NC only)
  double delay = kInfinity;  // t_c(u)
  bool rate_limited = false;
};

struct ClientDelay {
  NodeId client = 0;
  double delay = kInfinity;
  bool reachable = false;
};

struct DelayReport {
  std::vector<ClientDelay> clients;
  std::vector<SenderEstimate> senders;
  int iterations = 0;
  bool converged = false;
  /// Overflow losses are charged at the receiving node of each hop.
  bool beta_at_receiver = true;

  double total_delay() const {
    double s = 0.0;
    for (const auto& c : clients) s += c.delay;
    return s;
  }
  double mean_delay() const { return clients.empty() ? kInfinity : total_delay() / clients.size(); }
  double delay_of(NodeId client) const {
    for (const auto& c : clients)
      if (c.client == client) return c.delay;
    throw std::out_of_range("DelayReport: unknown client");
  }
  bool all_reachable() const {
    return std::all_of(clients.begin(), clients.end(), [](const ClientDelay& c) { return c.reachable; });
  }
};

inline void write_csv(std::ostream& os, const DelayReport& r) {
  os << "client_id,t_c_seconds,iterations,converged\n";
  os.precision(10);
  for (const auto& c : r.clients)
    os << c.client << ',' << c.delay << ',' << r.iterations << ',' << (r.converged ? "true" : "false") << '\n';
}

class Estimator {
 public:
  Estimator(const OverlayGraph& g, int generation_size, EstimatorOptions opts = {})
      : graph_(g), net_(g), g_(generation_size), opts_(opts) {
    if (g.sources().empty() || g.clients().empty())
      throw std::invalid_argument("estimate: graph needs at least one source and one client");
    base_.roles.resize(net_.size());
    for (std::size_t i = 0; i < net_.size(); ++i) base_.roles[i] = net_.role(i);
    for (NodeId s : g.sources()) senders_.push_back(net_.index(s));
    for (NodeId u : nc_processing_order(g)) nc_order_.push_back(net_.index(u));
  }

  DelayReport run() {
    DelayReport report;
    std::vector<double> previous;
    double horizon = 0.0;
    for (int it = 1; it <= opts_.max_iterations; ++it) {
      report = pass(horizon);
      report.iterations = it;
      std::vector<double> now;
      double worst = 0.0;
      for (const auto& c : report.clients) {
        now.push_back(c.delay);
        if (std::isfinite(c.delay)) worst = std::max(worst, c.delay);
      }
      if (!previous.empty() && max_relative_change(previous, now) < opts_.tolerance) {
        report.converged = true;
        return report;
      }
      previous = std::move(now);
      horizon = worst;
    }
    return report;
  }

  /// Rate at which u (currently NC) carries useful packets to c when it acts
  /// as SF, and the resulting N_c(u). Uses the plain b_o/b_i replication.
  std::pair<double, double> useful_rate(NodeId u, NodeId c) {
    const auto client = net_.index(c);
    const auto ui = net_.index(u);
    ReplicationPolicy rep;
    const auto losses = compute_losses(net_, base_, client, rep);
    std::vector<double> rates(net_.size(), 0.0);
    std::vector<double> useful(net_.size(), 0.0);
    for (auto s : senders_) useful[s] = losses.b_out[s] * (1.0 - losses.eps[s]);
    std::vector<std::size_t> processed = senders_;
    for (std::size_t pos = 0; pos < nc_order_.size(); ++pos) {
      const auto w = nc_order_[pos];
      const auto [delta, n] = differential(pos, client, processed, useful, rep);
      useful[w] = n;
      if (w == ui) return {delta, n};
      processed.push_back(w);
    }
    throw std::invalid_argument("useful_rate: node is not an NC node of the graph");
  }

 private:
  static double max_relative_change(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::isinf(a[i]) && std::isinf(b[i])) continue;
      if (std::isinf(a[i]) || std::isinf(b[i])) return kInfinity;
      worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(a[i]), 1e-300));
    }
    return worst;
  }

  double sender_delay(std::size_t w, const LossMap& m, double useful) {
    const double b = m.b_out[w];
    const double e = m.eps[w];
    if (base_.roles[w] == Role::Source) return (b > 0.0 && e < 1.0) ? g_ / (b * (1.0 - e)) : kInfinity;
    if (!(useful > 0.0) || !(b > 0.0) || e >= 1.0) return kInfinity;
    if (useful >= b) return g_ / (b * (1.0 - e));
    const double nu = b / useful;
    const auto key = std::make_pair(nu, e);
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      double expected = 0.0;
      try {
        expected = expected_sources(nu, e, g_, opts_.truncation);
      } catch (const DivergenceError&) {
        expected = g_ * useful / (b * (1.0 - e));
      }
      it = memo_.emplace(key, expected).first;
    }
    return it->second / useful;
  }

  /// Differential useful-rate estimate for the NC node at position `pos` of
  /// the processing order: the composite rate of the already processed
  /// senders with it in SF mode minus the same with it silent, then mapped
  /// back to the rate arriving at the node. NC nodes not processed yet
  /// forward as SF here, otherwise a node whose every path to the client
  /// crosses a later NC node would get no useful rate at all.
  std::pair<double, double> differential(std::size_t pos, std::size_t client, const std::vector<std::size_t>& processed,
                                         const std::vector<double>& useful, const ReplicationPolicy& rep) {
    const std::size_t w = nc_order_[pos];
    Configuration as_sf = base_;
    for (std::size_t later = pos; later < nc_order_.size(); ++later) as_sf.roles[nc_order_[later]] = Role::SF;
    Configuration silent = as_sf;
    silent.silent = w;
    const auto m_sf = compute_losses(net_, as_sf, client, rep);
    const auto m_silent = compute_losses(net_, silent, client, rep);
    double delta = 0.0;
    for (auto s : processed) {
      if (m_sf.eps[s] == m_silent.eps[s] && m_sf.b_out[s] == m_silent.b_out[s]) continue;
      const double a = sender_delay(s, m_sf, useful[s]);
      const double b = sender_delay(s, m_silent, useful[s]);
      delta += (std::isfinite(a) ? 1.0 / a : 0.0) - (std::isfinite(b) ? 1.0 / b : 0.0);
    }
    // 1/t counts generations per second; the useful rate is in packets.
    delta = std::max(0.0, delta) * g_;
    const double bo = m_sf.b_out[w];
    const double bi = m_sf.b_in[w];
    const double e = m_sf.eps[w];
    double denom = 0.0;
    if (bi > 0.0) {
      denom = bo >= bi ? 1.0 - std::pow(e, m_sf.rhat[w]) : (bo / bi) * (1.0 - e);
    }
    const double n = denom > 0.0 ? delta / denom : 0.0;
    return {delta, n};
  }

  DelayReport pass(double horizon) {
    DelayReport report;
    ReplicationPolicy rep;
    rep.horizon = horizon;
    for (NodeId cid : graph_.clients()) {
      const auto client = net_.index(cid);
      const auto losses = compute_losses(net_, base_, client, rep);
      std::vector<double> useful(net_.size(), 0.0);
      double rate = 0.0;
      std::vector<std::size_t> processed;
      for (auto s : senders_) {
        useful[s] = losses.b_out[s] * (1.0 - losses.eps[s]);
        const double t = sender_delay(s, losses, useful[s]);
        if (std::isfinite(t)) rate += 1.0 / t;
        report.senders.push_back({net_.id(s), cid, Role::Source, losses.eps[s], useful[s], 0.0, t, false});
        processed.push_back(s);
      }
      for (std::size_t pos = 0; pos < nc_order_.size(); ++pos) {
        const auto w = nc_order_[pos];
        const auto [delta, n] = differential(pos, client, processed, useful, rep);
        useful[w] = n;
        const double t = sender_delay(w, losses, n);
        if (std::isfinite(t)) rate += 1.0 / t;
        report.senders.push_back({net_.id(w), cid, Role::NC, losses.eps[w], n, delta, t, n < losses.b_out[w]});
        processed.push_back(w);
      }
      ClientDelay cd;
      cd.client = cid;
      cd.reachable = rate > 0.0;
      cd.delay = rate > 0.0 ? 1.0 / rate : kInfinity;
      report.clients.push_back(cd);
    }
    return report;
  }

  const OverlayGraph& graph_;
  NetworkView net_;
  int g_;
  EstimatorOptions opts_;
  Configuration base_;
  std::vector<std::size_t> senders_;
  std::vector<std::size_t> nc_order_;
  std::map<std::pair<double, double>, double> memo_;
};

inline DelayReport estimate(const OverlayGraph& g, int generation_size, EstimatorOptions opts = {}) {
  return Estimator(g, generation_size, opts).run();
}

}  // namespace ncplace::delay
