#pragma once

// Replication model of a store-and-forward node with a main buffer (MB) and a
// copies buffer (CB), both FIFO of capacity h. When the outgoing bandwidth
// exceeds the incoming one, the spare opportunities send uniform picks from
// CB; how often a packet is replicated depends on its arrival position.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace ncplace::buffer {

/// Expected number of transmissions (original plus replicas) of the k-th
/// packet of a generation, 1-based. Three regimes: early arrivals while CB
/// fills (k <= h), the stationary range (h < k <= last), and the late
/// packets flushed at the deadline (k > last). `last` is the index of the
/// last packet that lives through a full CB lifecycle.
inline double per_packet_replication(long k, int h, double rate, long last, long n_total) {
  if (k < 1 || k > n_total) throw std::out_of_range("per_packet_replication: k outside [1, N]");
  if (h < 1) throw std::invalid_argument("per_packet_replication: h must be >= 1");
  if (rate <= 1.0) return 1.0;
  const double spare = rate - 1.0;
  if (k <= h && k <= last) {
    double harmonic = 0.0;
    for (long x = k; x <= h; ++x) harmonic += 1.0 / static_cast<double>(x);
    return 1.0 + spare * (harmonic + static_cast<double>(k - 1) / h);
  }
  if (k <= last) return rate;
  const long kp = k - last;
  return 1.0 + spare * static_cast<double>(h - kp + 1) / h;
}

/// Index of the last packet completing a CB lifecycle.
inline long last_full_lifecycle(int h, long n_total) { return std::max<long>(h, n_total - h); }

/// Single replication count that preserves the expected number of packets
/// delivered through a loss probability `eps` per copy.
inline double equivalent_replication(std::span<const double> per_packet, double eps) {
  if (per_packet.empty()) throw std::invalid_argument("equivalent_replication: empty sequence");
  const double n = static_cast<double>(per_packet.size());
  const double mean_r = std::accumulate(per_packet.begin(), per_packet.end(), 0.0) / n;
  if (eps <= 0.0) return 1.0;
  if (eps >= 1.0) return mean_r;
  const bool constant = std::all_of(per_packet.begin(), per_packet.end(),
                                    [&](double r) { return r == per_packet.front(); });
  if (constant) return per_packet.front();
  double all_lost = 0.0;
  for (double r : per_packet) all_lost += std::pow(eps, r);
  all_lost /= n;
  return std::log(all_lost) / std::log(eps);
}

/// Same value as building the per-packet sequence and calling the overload
/// above, but summing the constant stationary run in one step.
inline double equivalent_replication(int h, double rate, long n_total, double eps) {
  if (rate <= 1.0) return 1.0;
  if (eps <= 0.0) return 1.0;
  const long last = last_full_lifecycle(h, n_total);
  double all_lost = 0.0;
  double copies = 0.0;
  const long early_end = std::min<long>(std::min<long>(h, last), n_total);
  for (long k = 1; k <= early_end; ++k) {
    const double r = per_packet_replication(k, h, rate, last, n_total);
    all_lost += std::pow(eps, r);
    copies += r;
  }
  const long stationary = std::max<long>(0, std::min(last, n_total) - early_end);
  all_lost += static_cast<double>(stationary) * std::pow(eps, rate);
  copies += static_cast<double>(stationary) * rate;
  for (long k = std::max(last, early_end) + 1; k <= n_total; ++k) {
    const double r = per_packet_replication(k, h, rate, last, n_total);
    all_lost += std::pow(eps, r);
    copies += r;
  }
  const double n = static_cast<double>(n_total);
  if (eps >= 1.0) return copies / n;
  if (stationary == n_total) return rate;
  return std::log(all_lost / n) / std::log(eps);
}

/// Probability that an arriving packet is overwritten in MB before it can
/// be sent.
inline double drop_probability(double b_out, double b_in) {
  if (!(b_in > 0.0)) throw std::invalid_argument("drop_probability: incoming bandwidth must be positive");
  return b_out < b_in ? 1.0 - b_out / b_in : 0.0;
}

struct ReplicationProfile {
  int h = 0;
  double rate = 1.0;       // b_o / b_i
  long last_full = 0;      // K
  long n_total = 0;        // packets of the generation reaching the node
  std::vector<double> per_packet;
  double equivalent = 1.0;
  bool fills_buffer = false;

  long early_count() const { return std::min<long>(h, n_total); }
  long stationary_count() const { return std::max<long>(0, std::min(last_full, n_total) - h); }
  long late_count() const { return n_total - early_count() - stationary_count(); }
};

inline ReplicationProfile build_profile(int h, double b_out, double b_in, double n_packets, double eps) {
  if (!(n_packets > 0.0)) throw std::invalid_argument("build_profile: need at least one packet");
  ReplicationProfile p;
  p.h = h;
  p.rate = b_in > 0.0 ? b_out / b_in : 1.0;
  p.n_total = std::max<long>(1, std::lround(n_packets));
  p.last_full = last_full_lifecycle(h, p.n_total);
  p.fills_buffer = p.n_total >= h;
  p.per_packet.resize(static_cast<std::size_t>(p.n_total));
  for (long k = 1; k <= p.n_total; ++k)
    p.per_packet[static_cast<std::size_t>(k - 1)] = per_packet_replication(k, h, p.rate, p.last_full, p.n_total);
  p.equivalent = p.rate <= 1.0 ? 1.0 : equivalent_replication(p.per_packet, eps);
  return p;
}

}  // namespace ncplace::buffer
