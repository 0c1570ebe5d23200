#pragma once

// Reference computations used as independent checks of the analytic models.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "ncplace/topology.hpp"

namespace oracles {

/// Copies-buffer process of one SF node, one arrival per epoch. Each epoch
/// sends the new packet, stores it in a FIFO of capacity h, then spends
/// rate-1 spare opportunities on uniform picks from the buffer (the
/// fractional part is a Bernoulli extra pick). Returns the mean number of
/// transmissions of each packet position.
inline std::vector<double> copies_buffer_mc(int h, double rate, int n_total, int generations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double spare = rate - 1.0;
  const int whole = static_cast<int>(std::floor(spare));
  std::bernoulli_distribution extra(spare - whole);
  std::vector<double> sent(static_cast<std::size_t>(n_total), 0.0);
  std::deque<int> cb;
  for (int gen = 0; gen < generations; ++gen) {
    cb.clear();
    for (int k = 0; k < n_total; ++k) {
      sent[static_cast<std::size_t>(k)] += 1.0;
      cb.push_back(k);
      if (static_cast<int>(cb.size()) > h) cb.pop_front();
      const int picks = whole + (extra(rng) ? 1 : 0);
      std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
      for (int i = 0; i < picks; ++i) sent[static_cast<std::size_t>(cb[pick(rng)])] += 1.0;
    }
  }
  for (auto& s : sent) s /= generations;
  return sent;
}

/// Transport of single packets sent by `from` towards `client`: each hop
/// picks an out-edge in proportion to bandwidth, is lost with the edge loss,
/// dropped on overflow at an SF receiver with probability 1 - b_o/b_i, and
/// an SF receiver forwards `copies(node)` independent copies. Other nodes
/// absorb. Returns the fraction of packets with no copy reaching the client.
inline double transport_loss_mc(const ncplace::OverlayGraph& g, ncplace::NodeId from, ncplace::NodeId client,
                                const std::function<int(ncplace::NodeId)>& copies, int packets,
                                std::uint64_t seed) {
  using ncplace::NodeId;
  using ncplace::Role;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::function<bool(NodeId)> send = [&](NodeId v) -> bool {
    const auto& out = g.out_edges(v);
    if (out.empty()) return false;
    double x = u01(rng) * g.out_bandwidth(v);
    std::size_t chosen = out.back();
    for (auto e : out) {
      x -= g.edges()[e].bandwidth;
      if (x < 0.0) {
        chosen = e;
        break;
      }
    }
    const auto& edge = g.edges()[chosen];
    if (u01(rng) < edge.loss) return false;
    const NodeId w = edge.to;
    if (w == client) return true;
    if (g.role(w) != Role::SF) return false;
    const double bi = g.in_bandwidth(w);
    const double bo = g.out_bandwidth(w);
    if (bo < bi && u01(rng) < 1.0 - bo / bi) return false;
    bool any = false;
    for (int c = 0; c < copies(w); ++c) any = send(w) || any;
    return any;
  };
  int lost = 0;
  for (int i = 0; i < packets; ++i)
    if (!send(from)) ++lost;
  return static_cast<double>(lost) / packets;
}

/// Expected number of useful arrivals at a single sender before the client
/// reaches rank g, by explicit enumeration of every per-packet
/// delivered/lost outcome. Each useful arrival n triggers `nu` transmissions
/// (integer), each delivered with probability 1 - eps; the client's rank
/// never exceeds the sender's, min(n, g). Truncated at n_max.
inline double expected_sources_bruteforce(int nu, double eps, int g, int n_max = 400) {
  // state: client rank r after n arrivals; enumerate outcome bit patterns
  std::map<int, double> state{{0, 1.0}};
  double expected = 0.0;
  for (int n = 1; n <= n_max && !state.empty(); ++n) {
    std::map<int, double> next;
    const int cap = std::min(n, g);
    for (const auto& [r, p] : state) {
      for (unsigned pattern = 0; pattern < (1u << nu); ++pattern) {
        double q = p;
        int rank = r;
        for (int i = 0; i < nu; ++i) {
          const bool delivered = pattern >> i & 1u;
          q *= delivered ? 1.0 - eps : eps;
          if (delivered && rank < cap) ++rank;
        }
        if (q == 0.0) continue;
        if (rank == g) expected += n * q;
        else next[rank] += q;
      }
    }
    state.swap(next);
  }
  return expected;
}

inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

/// Spearman rank correlation with average ranks for ties; NaN when either
/// side is constant.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracles
