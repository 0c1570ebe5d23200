#pragma once

// Arithmetic over GF(2^8) with the polynomial x^8+x^4+x^3+x+1 (0x11B) and
// the dense linear algebra the coder and decoders need.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ncplace::gf {

using Element = std::uint8_t;
using Row = std::vector<Element>;

inline constexpr unsigned kPolynomial = 0x11B;
// 0x02 is not primitive for 0x11B; 0x03 is.
inline constexpr Element kGenerator = 0x03;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Carry-less shift-and-xor product reduced mod 0x11B. Slow; used to seed
/// the tables and as the reference the tables are checked against.
constexpr Element mul_slow(Element a, Element b) {
  unsigned x = a;
  unsigned y = b;
  unsigned acc = 0;
  while (y != 0) {
    if (y & 1u) acc ^= x;
    y >>= 1;
    x <<= 1;
    if (x & 0x100u) x ^= kPolynomial;
  }
  return static_cast<Element>(acc);
}

struct Tables {
  std::array<Element, 512> exp{};
  std::array<int, 256> log{};
  std::array<Element, 256> inv{};
  std::array<std::array<Element, 256>, 256> mul{};
};

namespace detail {

inline Tables build_tables() {
  Tables t;
  Element x = 1;
  for (int i = 0; i < 255; ++i) {
    t.exp[i] = x;
    t.log[x] = i;
    x = mul_slow(x, kGenerator);
  }
  for (int i = 255; i < 512; ++i) t.exp[i] = t.exp[i - 255];
  t.log[0] = -1;
  t.inv[0] = 0;
  for (int a = 1; a < 256; ++a) t.inv[a] = t.exp[255 - t.log[a]];
  for (int a = 0; a < 256; ++a) {
    for (int b = 0; b < 256; ++b) {
      t.mul[a][b] = (a == 0 || b == 0) ? Element{0} : t.exp[t.log[a] + t.log[b]];
    }
  }
  return t;
}

}  // namespace detail

inline const Tables& tables() {
  static const Tables t = detail::build_tables();
  return t;
}

constexpr Element add(Element a, Element b) { return static_cast<Element>(a ^ b); }

inline Element mul(Element a, Element b) { return tables().mul[a][b]; }

inline Element inv(Element a) {
  if (a == 0) throw DomainError("gf256: zero has no multiplicative inverse");
  return tables().inv[a];
}

inline Element div(Element a, Element b) { return mul(a, inv(b)); }

/// dst += coef * src, element-wise.
inline void axpy(std::span<Element> dst, std::span<const Element> src, Element coef) {
  if (coef == 0) return;
  const auto& row = tables().mul[coef];
  const std::size_t n = std::min(dst.size(), src.size());
  for (std::size_t i = 0; i < n; ++i) dst[i] ^= row[src[i]];
}

inline void scale(std::span<Element> v, Element coef) {
  const auto& row = tables().mul[coef];
  for (auto& e : v) e = row[e];
}

inline bool is_zero(std::span<const Element> v) {
  for (auto e : v)
    if (e != 0) return false;
  return true;
}

/// Row rank by Gaussian elimination on a copy of `rows`.
inline std::size_t rank(std::vector<Row> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t pivot = r;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[r], rows[pivot]);
    scale(rows[r], inv(rows[r][c]));
    for (std::size_t i = r + 1; i < rows.size(); ++i) axpy(rows[i], rows[r], rows[i][c]);
    ++r;
  }
  return r;
}

/// Solves c = F * n for n, where each c[i] / n[i] is a byte payload and the
/// field operations apply independently per byte position.
inline std::vector<Row> solve(std::vector<Row> f, std::vector<Row> c) {
  const std::size_t g = f.size();
  if (c.size() != g) throw std::invalid_argument("gf256::solve: row count mismatch");
  for (const auto& row : f)
    if (row.size() != g) throw std::invalid_argument("gf256::solve: matrix must be square");
  for (std::size_t col = 0; col < g; ++col) {
    std::size_t pivot = col;
    while (pivot < g && f[pivot][col] == 0) ++pivot;
    if (pivot == g) throw DomainError("gf256::solve: coefficient matrix is rank deficient");
    std::swap(f[col], f[pivot]);
    std::swap(c[col], c[pivot]);
    const Element s = inv(f[col][col]);
    scale(f[col], s);
    scale(c[col], s);
    for (std::size_t i = 0; i < g; ++i) {
      if (i == col || f[i][col] == 0) continue;
      const Element k = f[i][col];
      axpy(f[i], f[col], k);
      axpy(c[i], c[col], k);
    }
  }
  return c;
}

/// Coefficient matrix kept in reduced row-echelon form as rows are inserted,
/// with an optional payload row carried alongside each coefficient row.
class CoeffMatrix {
 public:
  explicit CoeffMatrix(std::size_t width) : width_(width) {}

  std::size_t width() const { return width_; }
  std::size_t rank() const { return rows_.size(); }
  bool full() const { return rows_.size() == width_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<Row>& payloads() const { return payloads_; }

  /// True iff `coeffs` lies outside the current row space.
  bool is_innovative(std::span<const Element> coeffs) const {
    if (full()) return false;
    Row v(coeffs.begin(), coeffs.end());
    reduce(v, nullptr);
    return !is_zero(v);
  }

  /// Inserts a row; returns true iff the rank grew. Payload may be empty.
  bool insert(std::span<const Element> coeffs, std::span<const Element> payload = {}) {
    if (coeffs.size() != width_) throw std::invalid_argument("CoeffMatrix: row width mismatch");
    if (full()) return false;
    Row v(coeffs.begin(), coeffs.end());
    Row p(payload.begin(), payload.end());
    reduce(v, &p);
    std::size_t lead = 0;
    while (lead < width_ && v[lead] == 0) ++lead;
    if (lead == width_) return false;
    const Element s = inv(v[lead]);
    scale(v, s);
    scale(p, s);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Element k = rows_[i][lead];
      if (k == 0) continue;
      axpy(rows_[i], v, k);
      axpy(payloads_[i], p, k);
    }
    // Keep rows ordered by pivot column.
    std::size_t at = 0;
    while (at < pivots_.size() && pivots_[at] < lead) ++at;
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(at), std::move(v));
    payloads_.insert(payloads_.begin() + static_cast<std::ptrdiff_t>(at), std::move(p));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(at), lead);
    return true;
  }

 private:
  void reduce(Row& v, Row* payload) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Element k = v[pivots_[i]];
      if (k == 0) continue;
      axpy(v, rows_[i], k);
      if (payload != nullptr) axpy(*payload, payloads_[i], k);
    }
  }

  std::size_t width_;
  std::vector<Row> rows_;
  std::vector<Row> payloads_;
  std::vector<std::size_t> pivots_;
};

}  // namespace ncplace::gf
