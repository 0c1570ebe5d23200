#pragma once

// Packet-level discrete-event simulation of one generation pushed through the
// overlay. Edges own their transmission schedules (deterministic pacing at
// 1/b, phase 0); every transmission is lost independently with the edge's
// loss rate. SF nodes run the MB/CB policy, NC nodes keep only innovative
// arrivals and send fresh random combinations, clients decode.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <thread>
#include <unordered_set>
#include <vector>

#include "ncplace/delay_estimator.hpp"
#include "ncplace/gf256.hpp"
#include "ncplace/rnc.hpp"
#include "ncplace/topology.hpp"

namespace ncplace::sim {

struct SimOptions {
  int generation_size = 32;
  std::size_t packet_size = rnc::kDefaultPacketSize;  // 0 tracks coefficients only
  double deadline = 0.0;                              // <= 0: 50x the estimated delay
  std::uint64_t seed = 1;
  double latency = 0.0;  // per-edge propagation delay, seconds
  bool record_trace = false;
};

struct EdgeCounters {
  std::uint64_t sent = 0;
  std::uint64_t lost = 0;
  std::uint64_t delivered = 0;
  std::uint64_t in_flight = 0;
};

struct NodeCounters {
  std::uint64_t received = 0;
  std::uint64_t accepted = 0;
  std::uint64_t overflow = 0;     // overwritten in MB before being sent
  std::uint64_t duplicates = 0;   // SF: packet already seen
  std::uint64_t redundant = 0;    // NC/client: not innovative
};

struct ClientOutcome {
  NodeId client = 0;
  bool complete = false;
  double delay = std::numeric_limits<double>::quiet_NaN();  // time of the G-th innovative packet
  double first_innovative = std::numeric_limits<double>::quiet_NaN();
  double useful_rate = 0.0;  // (G-1) / (t_G - t_1), packets/second
  std::size_t rank = 0;
  std::uint64_t arrivals = 0;            // before decoding completed
  std::uint64_t redundant_arrivals = 0;  // non-innovative among those
  bool payload_verified = false;         // decoded payloads equal the natives
};

struct TraceRecord {
  double time = 0.0;
  NodeId from = 0;
  NodeId to = 0;
  std::vector<std::uint8_t> wire;
};

struct SimResult {
  std::vector<ClientOutcome> clients;
  std::vector<EdgeCounters> edges;  // aligned with OverlayGraph::edges()
  std::vector<NodeCounters> nodes;  // aligned with OverlayGraph::nodes()
  std::vector<TraceRecord> trace;
  double end_time = 0.0;
  double deadline = 0.0;

  bool all_complete() const {
    return std::all_of(clients.begin(), clients.end(), [](const ClientOutcome& c) { return c.complete; });
  }
  double mean_delay() const {
    double s = 0.0;
    for (const auto& c : clients) s += c.complete ? c.delay : std::numeric_limits<double>::infinity();
    return clients.empty() ? std::numeric_limits<double>::quiet_NaN() : s / clients.size();
  }
  double aggregate_useful_rate() const {
    double s = 0.0;
    for (const auto& c : clients) s += c.useful_rate;
    return s;
  }
  std::uint64_t total_sent() const {
    std::uint64_t s = 0;
    for (const auto& e : edges) s += e.sent;
    return s;
  }
};

/// Fraction of client arrivals (before decoding) that carried no new rank.
inline double measure_duplicates(const SimResult& r) {
  std::uint64_t arrivals = 0;
  std::uint64_t redundant = 0;
  for (const auto& c : r.clients) {
    arrivals += c.arrivals;
    redundant += c.redundant_arrivals;
  }
  return arrivals == 0 ? 0.0 : static_cast<double>(redundant) / static_cast<double>(arrivals);
}

/// Default deadline: 50x the largest finite estimated client delay.
inline double default_deadline(const OverlayGraph& g, int generation_size) {
  const auto report = delay::estimate(g, generation_size);
  double worst = 0.0;
  for (const auto& c : report.clients)
    if (std::isfinite(c.delay)) worst = std::max(worst, c.delay);
  return worst > 0.0 ? 50.0 * worst : 1000.0;
}

namespace detail {

struct Packet {
  std::uint64_t uid = 0;
  rnc::CodedPacket coded;
};
using PacketPtr = std::shared_ptr<const Packet>;

enum class EventKind : int { Arrival = 0, Transmit = 1, Deadline = 2 };

struct Event {
  double time;
  EventKind kind;
  std::size_t edge;
  std::uint64_t seq;
  PacketPtr packet;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    if (a.edge != b.edge) return a.edge > b.edge;
    return a.seq > b.seq;
  }
};

struct NodeState {
  Role role = Role::SF;
  std::size_t capacity = 16;
  // SF
  std::deque<PacketPtr> main_buffer;
  std::deque<PacketPtr> copies;
  std::unordered_set<std::uint64_t> seen;
  // NC and clients
  std::unique_ptr<gf::CoeffMatrix> matrix;
  // clients
  std::size_t client_slot = 0;
};

class Simulation {
 public:
  Simulation(const OverlayGraph& g, const SimOptions& opts)
      : g_(g), opts_(opts), rng_(opts.seed), G_(static_cast<std::size_t>(opts.generation_size)) {
    if (opts.generation_size < 1) throw std::invalid_argument("simulate: generation size must be >= 1");
    result_.edges.resize(g.edges().size());
    result_.nodes.resize(g.node_count());
    result_.deadline = opts.deadline > 0.0 ? opts.deadline : default_deadline(g, opts.generation_size);
    generation_ = rnc::make_generation(0, G_, opts.packet_size, rng_);
    nodes_.resize(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const auto& rec = g.nodes()[i];
      auto& st = nodes_[i];
      st.role = rec.role;
      st.capacity = static_cast<std::size_t>(rec.buffer_capacity);
      if (rec.role == Role::NC || rec.role == Role::Client) st.matrix = std::make_unique<gf::CoeffMatrix>(G_);
      if (rec.role == Role::Client) {
        st.client_slot = result_.clients.size();
        ClientOutcome c;
        c.client = rec.id;
        result_.clients.push_back(c);
      }
    }
    pending_clients_ = result_.clients.size();
    for (const auto& e : g.edges()) {
      edge_from_.push_back(g.index_of(e.from));
      edge_to_.push_back(g.index_of(e.to));
    }
  }

  SimResult run() {
    for (std::size_t e = 0; e < g_.edges().size(); ++e) {
      next_slot_.push_back(0);
      schedule_transmit(e);
    }
    queue_.push({result_.deadline, EventKind::Deadline, 0, seq_++, nullptr});
    while (!queue_.empty() && pending_clients_ > 0) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case EventKind::Transmit: transmit(ev.edge); break;
        case EventKind::Arrival: arrive(ev.edge, ev.packet); break;
        case EventKind::Deadline: flush(); break;
      }
      if (ev.kind == EventKind::Deadline) break;
    }
    while (!queue_.empty()) {
      const Event& ev = queue_.top();
      if (ev.kind == EventKind::Arrival) {
        ++result_.edges[ev.edge].in_flight;
      }
      queue_.pop();
    }
    result_.end_time = now_;
    finish_clients();
    return std::move(result_);
  }

 private:
  void schedule_transmit(std::size_t e) {
    const double t = static_cast<double>(next_slot_[e]++) / g_.edges()[e].bandwidth;
    queue_.push({t, EventKind::Transmit, e, seq_++, nullptr});
  }

  PacketPtr fresh(rnc::CodedPacket coded) {
    auto p = std::make_shared<Packet>();
    p->uid = next_uid_++;
    p->coded = std::move(coded);
    return p;
  }

  PacketPtr next_packet(std::size_t node) {
    auto& st = nodes_[node];
    switch (st.role) {
      case Role::Source:
        if (opts_.packet_size == 0) return fresh({0, rnc::random_coefficients(G_, rng_), {}});
        return fresh(rnc::encode_source(generation_, rng_));
      case Role::NC: {
        if (st.matrix->rank() == 0) return nullptr;
        const auto& rows = st.matrix->rows();
        const auto& payloads = st.matrix->payloads();
        std::vector<gf::Element> mix(rows.size());
        do {
          for (auto& f : mix) f = rnc::random_element(rng_);
        } while (gf::is_zero(mix));
        rnc::CodedPacket out{0, gf::Row(G_, 0), gf::Row(opts_.packet_size, 0)};
        for (std::size_t i = 0; i < rows.size(); ++i) {
          gf::axpy(out.coeffs, rows[i], mix[i]);
          if (opts_.packet_size > 0) gf::axpy(out.payload, payloads[i], mix[i]);
        }
        return fresh(std::move(out));
      }
      case Role::SF: {
        if (!st.main_buffer.empty()) {
          PacketPtr p = st.main_buffer.front();
          st.main_buffer.pop_front();
          st.copies.push_back(p);
          if (st.copies.size() > st.capacity) st.copies.pop_front();
          return p;
        }
        if (st.copies.empty()) return nullptr;
        std::uniform_int_distribution<std::size_t> pick(0, st.copies.size() - 1);
        return st.copies[pick(rng_)];
      }
      case Role::Client: return nullptr;
    }
    return nullptr;
  }

  void transmit(std::size_t e) {
    const auto& edge = g_.edges()[e];
    schedule_transmit(e);
    PacketPtr p = next_packet(edge_from_[e]);
    if (!p) return;
    auto& c = result_.edges[e];
    ++c.sent;
    if (std::bernoulli_distribution(edge.loss)(rng_)) {
      ++c.lost;
      return;
    }
    queue_.push({now_ + opts_.latency, EventKind::Arrival, e, seq_++, std::move(p)});
  }

  void arrive(std::size_t e, const PacketPtr& p) {
    const auto& edge = g_.edges()[e];
    ++result_.edges[e].delivered;
    const auto node = edge_to_[e];
    auto& st = nodes_[node];
    auto& nc = result_.nodes[node];
    ++nc.received;
    if (opts_.record_trace) result_.trace.push_back({now_, edge.from, edge.to, rnc::serialize(p->coded)});
    switch (st.role) {
      case Role::SF:
        if (!st.seen.insert(p->uid).second) {
          ++nc.duplicates;
          return;
        }
        ++nc.accepted;
        st.main_buffer.push_back(p);
        if (st.main_buffer.size() > st.capacity) {
          st.main_buffer.pop_front();
          ++nc.overflow;
        }
        return;
      case Role::NC:
        if (st.matrix->insert(p->coded.coeffs, p->coded.payload)) ++nc.accepted;
        else ++nc.redundant;
        return;
      case Role::Client: {
        auto& out = result_.clients[st.client_slot];
        if (out.complete) return;
        ++out.arrivals;
        if (!st.matrix->insert(p->coded.coeffs, p->coded.payload)) {
          ++out.redundant_arrivals;
          ++nc.redundant;
          return;
        }
        ++nc.accepted;
        out.rank = st.matrix->rank();
        if (out.rank == 1) out.first_innovative = now_;
        if (out.rank == G_) {
          out.complete = true;
          out.delay = now_;
          --pending_clients_;
        }
        return;
      }
      case Role::Source: return;
    }
  }

  void flush() {
    for (auto& st : nodes_) {
      st.main_buffer.clear();
      st.copies.clear();
    }
  }

  void finish_clients() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& st = nodes_[i];
      if (st.role != Role::Client) continue;
      auto& out = result_.clients[st.client_slot];
      if (out.complete) {
        const double span = out.delay - out.first_innovative;
        out.useful_rate = span > 0.0 ? static_cast<double>(G_ - 1) / span : std::numeric_limits<double>::infinity();
        if (opts_.packet_size > 0) out.payload_verified = st.matrix->payloads() == generation_.native;
      }
    }
  }

  const OverlayGraph& g_;
  SimOptions opts_;
  std::mt19937_64 rng_;
  std::size_t G_;
  rnc::Generation generation_;
  std::vector<NodeState> nodes_;
  SimResult result_;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::vector<std::uint64_t> next_slot_;
  std::vector<std::size_t> edge_from_;
  std::vector<std::size_t> edge_to_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_uid_ = 1;
  std::size_t pending_clients_ = 0;
  double now_ = 0.0;
};

}  // namespace detail

inline SimResult simulate(const OverlayGraph& g, const SimOptions& opts) {
  g.validate();
  return detail::Simulation(g, opts).run();
}

inline SimResult simulate(const OverlayGraph& g, int generation_size, std::size_t packet_size, double deadline,
                          std::uint64_t seed) {
  SimOptions o;
  o.generation_size = generation_size;
  o.packet_size = packet_size;
  o.deadline = deadline;
  o.seed = seed;
  return simulate(g, o);
}

// ---------------------------------------------------------------------------
// Monte Carlo aggregation

struct Summary {
  std::size_t samples = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stddev = 0.0;
  double ci95 = 0.0;  // half-width, normal approximation

  static Summary of(const std::vector<double>& xs) {
    Summary s;
    s.samples = xs.size();
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
      double ss = 0.0;
      for (double x : xs) ss += (x - s.mean) * (x - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
      s.ci95 = 1.96 * s.stddev / std::sqrt(static_cast<double>(xs.size()));
    }
    return s;
  }
};

struct ClientSummary {
  NodeId client = 0;
  Summary delay;        // over completed runs
  Summary useful_rate;  // over completed runs
  std::size_t incomplete = 0;
};

struct MonteCarloResult {
  std::vector<ClientSummary> clients;
  std::size_t runs = 0;
  double duplicate_fraction = 0.0;  // mean over runs

  double mean_delay() const {
    double s = 0.0;
    for (const auto& c : clients) s += c.delay.mean;
    return clients.empty() ? std::numeric_limits<double>::quiet_NaN() : s / clients.size();
  }
  double aggregate_useful_rate() const {
    double s = 0.0;
    for (const auto& c : clients) s += c.useful_rate.mean;
    return s;
  }
  double delay_of(NodeId c) const {
    for (const auto& x : clients)
      if (x.client == c) return x.delay.mean;
    throw std::out_of_range("MonteCarloResult: unknown client");
  }
};

/// Seed of run i derived from the base seed (splitmix64 finalizer).
inline std::uint64_t run_seed(std::uint64_t base, std::uint64_t i) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Independent seeded runs, executed on `workers` threads (0: hardware
/// concurrency). Results do not depend on the worker count.
inline MonteCarloResult monte_carlo(const OverlayGraph& g, SimOptions opts, std::size_t runs,
                                    unsigned workers = 0) {
  if (runs < 1) throw std::invalid_argument("monte_carlo: runs must be >= 1");
  g.validate();
  if (opts.deadline <= 0.0) opts.deadline = default_deadline(g, opts.generation_size);
  std::vector<SimResult> results(runs);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, runs));
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < runs; i += stride) {
      SimOptions o = opts;
      o.seed = run_seed(opts.seed, i);
      o.record_trace = false;
      results[i] = simulate(g, o);
    }
  };
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, work, w, workers));
    for (auto& j : jobs) j.get();
  }

  MonteCarloResult mc;
  mc.runs = runs;
  const auto& first = results.front();
  for (std::size_t ci = 0; ci < first.clients.size(); ++ci) {
    ClientSummary s;
    s.client = first.clients[ci].client;
    std::vector<double> delays;
    std::vector<double> rates;
    for (const auto& r : results) {
      const auto& c = r.clients[ci];
      if (!c.complete) {
        ++s.incomplete;
        continue;
      }
      delays.push_back(c.delay);
      rates.push_back(c.useful_rate);
    }
    s.delay = Summary::of(delays);
    s.useful_rate = Summary::of(rates);
    mc.clients.push_back(s);
  }
  double dup = 0.0;
  for (const auto& r : results) dup += measure_duplicates(r);
  mc.duplicate_fraction = dup / static_cast<double>(runs);
  return mc;
}

inline void write_csv(std::ostream& os, const MonteCarloResult& mc) {
  os << "client_id,runs,completed,delay_mean,delay_stddev,delay_ci95,rate_mean,rate_stddev,rate_ci95\n";
  os.precision(10);
  for (const auto& c : mc.clients)
    os << c.client << ',' << mc.runs << ',' << c.delay.samples << ',' << c.delay.mean << ',' << c.delay.stddev << ','
       << c.delay.ci95 << ',' << c.useful_rate.mean << ',' << c.useful_rate.stddev << ',' << c.useful_rate.ci95
       << '\n';
}

}  // namespace ncplace::sim
