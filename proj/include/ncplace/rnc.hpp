#pragma once

// Randomized linear network coding over GF(2^8): generations, source
// encoding, recombination at relays, and progressive decoding.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncplace/gf256.hpp"

namespace ncplace::rnc {

using gf::Element;
using gf::Row;

inline constexpr std::size_t kDefaultGenerationSize = 32;
inline constexpr std::size_t kDefaultPacketSize = 512;

class GenerationMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RankDeficient : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Generation {
  std::uint32_t id = 0;
  std::vector<Row> native;  // G payloads of equal length
  double deadline = 0.0;

  std::size_t size() const { return native.size(); }
  std::size_t payload_size() const { return native.empty() ? 0 : native.front().size(); }
};

struct CodedPacket {
  std::uint32_t generation_id = 0;
  Row coeffs;   // one coefficient per native packet
  Row payload;  // may be empty when only coefficients are tracked

  friend bool operator==(const CodedPacket&, const CodedPacket&) = default;
};

template <class Rng>
Element random_element(Rng& rng) {
  std::uniform_int_distribution<int> d(0, 255);
  return static_cast<Element>(d(rng));
}

template <class Rng>
Generation make_generation(std::uint32_t id, std::size_t g, std::size_t payload_size, Rng& rng) {
  Generation gen;
  gen.id = id;
  gen.native.assign(g, Row(payload_size));
  for (auto& p : gen.native)
    for (auto& b : p) b = random_element(rng);
  return gen;
}

/// Draws i.i.d. uniform coefficients over the native packets.
template <class Rng>
CodedPacket encode_source(const Generation& gen, Rng& rng) {
  if (gen.native.empty()) throw std::invalid_argument("encode_source: empty generation");
  CodedPacket out;
  out.generation_id = gen.id;
  out.coeffs.resize(gen.size());
  out.payload.assign(gen.payload_size(), 0);
  for (std::size_t i = 0; i < gen.size(); ++i) {
    out.coeffs[i] = random_element(rng);
    gf::axpy(out.payload, gen.native[i], out.coeffs[i]);
  }
  return out;
}

/// Coefficient-only source packet: a uniform random vector of length g.
template <class Rng>
Row random_coefficients(std::size_t g, Rng& rng) {
  Row v(g);
  for (auto& e : v) e = random_element(rng);
  return v;
}

/// Random combination of the buffered packets. The mixing coefficients are
/// redrawn when all of them come out zero.
template <class Rng>
CodedPacket recombine(std::span<const CodedPacket> buffered, Rng& rng) {
  if (buffered.empty()) throw std::invalid_argument("recombine: no buffered packets");
  const auto gid = buffered.front().generation_id;
  for (const auto& p : buffered)
    if (p.generation_id != gid) throw GenerationMismatch("recombine: mixed generations");

  std::vector<Element> mix(buffered.size());
  do {
    for (auto& f : mix) f = random_element(rng);
  } while (gf::is_zero(mix));

  CodedPacket out;
  out.generation_id = gid;
  out.coeffs.assign(buffered.front().coeffs.size(), 0);
  out.payload.assign(buffered.front().payload.size(), 0);
  for (std::size_t i = 0; i < buffered.size(); ++i) {
    gf::axpy(out.coeffs, buffered[i].coeffs, mix[i]);
    gf::axpy(out.payload, buffered[i].payload, mix[i]);
  }
  return out;
}

/// Progressive Gauss-Jordan decoder for one generation.
class DecoderState {
 public:
  DecoderState(std::uint32_t generation_id, std::size_t g) : generation_id_(generation_id), matrix_(g) {}

  std::uint32_t generation_id() const { return generation_id_; }
  std::size_t generation_size() const { return matrix_.width(); }
  std::size_t rank() const { return matrix_.rank(); }
  bool decodable() const { return matrix_.full(); }
  const gf::CoeffMatrix& matrix() const { return matrix_; }

  bool is_innovative(const CodedPacket& p) const {
    check(p);
    return matrix_.is_innovative(p.coeffs);
  }

  /// Returns the rank after insertion.
  std::size_t ingest(const CodedPacket& p) {
    check(p);
    matrix_.insert(p.coeffs, p.payload);
    return matrix_.rank();
  }

  std::vector<Row> decode() const {
    if (!decodable())
      throw RankDeficient("decode: rank " + std::to_string(rank()) + " < " +
                          std::to_string(generation_size()));
    // Rows are in reduced echelon form ordered by pivot, so at full rank the
    // coefficient part is the identity and the payloads are the natives.
    return matrix_.payloads();
  }

  /// Buffered packets in reduced form, usable as recombination inputs.
  std::vector<CodedPacket> basis() const {
    std::vector<CodedPacket> out;
    out.reserve(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      out.push_back({generation_id_, matrix_.rows()[i], matrix_.payloads()[i]});
    return out;
  }

 private:
  void check(const CodedPacket& p) const {
    if (p.generation_id != generation_id_) throw GenerationMismatch("decoder: generation mismatch");
    if (p.coeffs.size() != matrix_.width()) throw std::invalid_argument("decoder: coefficient length mismatch");
  }

  std::uint32_t generation_id_;
  gf::CoeffMatrix matrix_;
};

// Wire layout: generation id (4 bytes, big-endian), G coefficient bytes,
// payload bytes.
inline std::vector<std::uint8_t> serialize(const CodedPacket& p) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + p.coeffs.size() + p.payload.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(p.generation_id >> shift));
  out.insert(out.end(), p.coeffs.begin(), p.coeffs.end());
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

inline CodedPacket deserialize(std::span<const std::uint8_t> bytes, std::size_t g, std::size_t payload_size) {
  if (bytes.size() != 4 + g + payload_size) throw std::invalid_argument("deserialize: record length mismatch");
  CodedPacket p;
  for (int i = 0; i < 4; ++i) p.generation_id = (p.generation_id << 8) | bytes[i];
  p.coeffs.assign(bytes.begin() + 4, bytes.begin() + 4 + static_cast<std::ptrdiff_t>(g));
  p.payload.assign(bytes.begin() + 4 + static_cast<std::ptrdiff_t>(g), bytes.end());
  return p;
}

}  // namespace ncplace::rnc
