#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbtrellis/errors.hpp"

namespace tbt {

/// Polynomial over GF(2) in the delay variable D, stored as a coefficient
/// bitmask: bit i is the coefficient of D^i. Degrees are capped at 63.
class BinaryPoly {
 public:
  /// degree() of the zero polynomial; ordered below every real degree.
  static constexpr int kMinusInfinity = std::numeric_limits<int>::min();
  static constexpr int kMaxDegree = 63;

  constexpr BinaryPoly() = default;

  static constexpr BinaryPoly zero() { return BinaryPoly(); }
  static constexpr BinaryPoly one() { return from_coefficients(1); }

  /// D^degree
  static BinaryPoly monomial(int degree) {
    if (degree < 0 || degree > kMaxDegree)
      throw DomainError("monomial degree out of range");
    return from_coefficients(uint64_t{1} << degree);
  }

  static constexpr BinaryPoly from_coefficients(uint64_t bits) {
    BinaryPoly p;
    p.bits_ = bits;
    return p;
  }

  uint64_t coefficients() const { return bits_; }
  bool is_zero() const { return bits_ == 0; }
  bool is_one() const { return bits_ == 1; }

  int degree() const {
    if (bits_ == 0) return kMinusInfinity;
    return 63 - std::countl_zero(bits_);
  }

  bool coeff(int i) const {
    if (i < 0 || i > kMaxDegree) return false;
    return (bits_ >> i) & 1;
  }

  /// Largest l such that D^l divides this polynomial. Undefined for zero.
  int lowest_power() const {
    if (bits_ == 0) throw DomainError("lowest_power of zero polynomial");
    return std::countr_zero(bits_);
  }

  bool divisible_by_monomial(int l) const {
    if (bits_ == 0) return true;
    return lowest_power() >= l;
  }

  friend BinaryPoly operator+(BinaryPoly a, BinaryPoly b) {
    return from_coefficients(a.bits_ ^ b.bits_);
  }

  BinaryPoly& operator+=(BinaryPoly o) {
    bits_ ^= o.bits_;
    return *this;
  }

  friend BinaryPoly operator*(BinaryPoly a, BinaryPoly b) {
    if (a.is_zero() || b.is_zero()) return zero();
    if (a.degree() + b.degree() > kMaxDegree)
      throw DomainError("polynomial degree overflow");
    uint64_t acc = 0;
    uint64_t x = a.bits_;
    uint64_t y = b.bits_;
    while (y) {
      int i = std::countr_zero(y);
      acc ^= x << i;
      y &= y - 1;
    }
    return from_coefficients(acc);
  }

  /// Quotient and remainder of division by D^l. Exact division has a zero
  /// remainder; the remainder collects the coefficients below D^l.
  std::pair<BinaryPoly, BinaryPoly> divmod_by_monomial(int l) const {
    if (l < 0 || l > kMaxDegree) throw DomainError("monomial degree out of range");
    uint64_t low = (l == 0) ? 0 : (bits_ & ((uint64_t{1} << l) - 1));
    return {from_coefficients(bits_ >> l), from_coefficients(low)};
  }

  /// Remainder of general polynomial division.
  static BinaryPoly mod(BinaryPoly a, BinaryPoly b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    while (!a.is_zero() && a.degree() >= b.degree())
      a.bits_ ^= b.bits_ << (a.degree() - b.degree());
    return a;
  }

  static BinaryPoly gcd(BinaryPoly a, BinaryPoly b) {
    while (!b.is_zero()) {
      BinaryPoly r = mod(a, b);
      a = b;
      b = r;
    }
    return a;
  }

  friend bool operator==(BinaryPoly a, BinaryPoly b) { return a.bits_ == b.bits_; }
  friend bool operator!=(BinaryPoly a, BinaryPoly b) { return a.bits_ != b.bits_; }
  friend bool operator<(BinaryPoly a, BinaryPoly b) { return a.bits_ < b.bits_; }

  /// Ascending-degree form: "0", "1", "D", "1+D+D^2".
  std::string to_string() const {
    if (bits_ == 0) return "0";
    std::string out;
    for (int i = 0; i <= degree(); ++i) {
      if (!coeff(i)) continue;
      if (!out.empty()) out += '+';
      if (i == 0)
        out += '1';
      else if (i == 1)
        out += 'D';
      else
        out += "D^" + std::to_string(i);
    }
    return out;
  }

 private:
  uint64_t bits_ = 0;
};

/// Dense binary matrix with rows as bitmasks (bit c = entry in column c).
struct BitMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<uint32_t> row_bits;

  BitMatrix() = default;
  BitMatrix(int r, int c) : rows(r), cols(c), row_bits(r, 0) {}

  bool get(int r, int c) const { return (row_bits[r] >> c) & 1; }
  void set(int r, int c, bool v) {
    uint32_t m = uint32_t{1} << c;
    if (v)
      row_bits[r] |= m;
    else
      row_bits[r] &= ~m;
  }

  /// v * M^T for a row vector v of width `cols`; component r is the parity
  /// of v masked by row r. Result has width `rows`.
  uint32_t apply_transposed(uint32_t v) const {
    uint32_t out = 0;
    for (int r = 0; r < rows; ++r)
      out |= uint32_t(std::popcount(v & row_bits[r]) & 1) << r;
    return out;
  }

  /// v * M for a row vector v of width `rows`: XOR of the selected rows.
  uint32_t left_mul(uint32_t v) const {
    uint32_t out = 0;
    while (v) {
      int r = std::countr_zero(v);
      out ^= row_bits[r];
      v &= v - 1;
    }
    return out;
  }

  int rank() const {
    std::vector<uint32_t> rs = row_bits;
    int rk = 0;
    for (int c = 0; c < cols && rk < rows; ++c) {
      int pivot = -1;
      for (int r = rk; r < rows; ++r)
        if ((rs[r] >> c) & 1) {
          pivot = r;
          break;
        }
      if (pivot < 0) continue;
      std::swap(rs[rk], rs[pivot]);
      for (int r = 0; r < rows; ++r)
        if (r != rk && ((rs[r] >> c) & 1)) rs[r] ^= rs[rk];
      ++rk;
    }
    return rk;
  }

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.row_bits == b.row_bits;
  }
};

/// Matrix over GF(2)[D], row-major.
class PolyMatrix {
 public:
  PolyMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), entries_(size_t(rows) * cols) {
    if (rows < 1 || cols < 1) throw DomainError("matrix dimensions must be positive");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const BinaryPoly& at(int r, int c) const { return entries_[size_t(r) * cols_ + c]; }
  BinaryPoly& at(int r, int c) { return entries_[size_t(r) * cols_ + c]; }

  /// Largest entry degree; 0 for the all-zero matrix.
  int memory_length() const {
    int m = 0;
    for (const auto& e : entries_)
      if (!e.is_zero()) m = std::max(m, e.degree());
    return m;
  }

  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  int rows_;
  int cols_;
  std::vector<BinaryPoly> entries_;
};

/// Coefficient expansion M(D) = sum_i C_i D^i as a list of binary matrices
/// C_0..C_M, where M is the memory length.
struct CoeffExpansion {
  int rows = 0;
  int cols = 0;
  std::vector<BitMatrix> coeff;  // size memory+1

  int memory() const { return int(coeff.size()) - 1; }
};

inline CoeffExpansion expand(const PolyMatrix& m) {
  CoeffExpansion e;
  e.rows = m.rows();
  e.cols = m.cols();
  int M = m.memory_length();
  e.coeff.assign(M + 1, BitMatrix(m.rows(), m.cols()));
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      for (int i = 0; i <= M; ++i)
        if (m.at(r, c).coeff(i)) e.coeff[i].set(r, c, true);
  return e;
}

inline PolyMatrix reconstruct(const CoeffExpansion& e) {
  PolyMatrix m(e.rows, e.cols);
  for (int r = 0; r < e.rows; ++r)
    for (int c = 0; c < e.cols; ++c) {
      uint64_t bits = 0;
      for (size_t i = 0; i < e.coeff.size(); ++i)
        if (e.coeff[i].get(r, c)) bits |= uint64_t{1} << i;
      m.at(r, c) = BinaryPoly::from_coefficients(bits);
    }
  return m;
}

/// Largest l such that D^l divides every entry of column c.
/// The all-zero column is rejected: it constrains nothing.
inline int column_monomial_factor(const PolyMatrix& m, int c) {
  if (c < 0 || c >= m.cols()) throw DomainError("column index out of range");
  int l = -1;
  for (int r = 0; r < m.rows(); ++r) {
    const BinaryPoly& p = m.at(r, c);
    if (p.is_zero()) continue;
    int lp = p.lowest_power();
    l = (l < 0) ? lp : std::min(l, lp);
  }
  if (l < 0) throw DomainError("column " + std::to_string(c + 1) + " is all zero");
  return l;
}

/// Per-row memory: max entry degree in each row. All-zero rows are rejected.
inline std::vector<int> row_degrees(const PolyMatrix& m) {
  std::vector<int> deg(m.rows(), -1);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c)
      if (!m.at(r, c).is_zero()) deg[r] = std::max(deg[r], m.at(r, c).degree());
    if (deg[r] < 0)
      throw DomainError("row " + std::to_string(r + 1) + " is all zero");
  }
  return deg;
}

inline int overall_constraint_length(const PolyMatrix& m) {
  auto deg = row_degrees(m);
  return std::accumulate(deg.begin(), deg.end(), 0);
}

/// Matrix of the coefficients of D^{deg r} in row r.
inline BitMatrix leading_coefficient_matrix(const PolyMatrix& m) {
  auto deg = row_degrees(m);
  BitMatrix lead(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (m.at(r, c).coeff(deg[r])) lead.set(r, c, true);
  return lead;
}

namespace detail {

inline BinaryPoly det_recursive(const PolyMatrix& m, std::vector<int>& rows,
                                std::vector<int>& cols) {
  if (rows.size() == 1) return m.at(rows[0], cols[0]);
  BinaryPoly acc;
  int r0 = rows[0];
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (size_t k = 0; k < cols.size(); ++k) {
    if (m.at(r0, cols[k]).is_zero()) continue;
    std::vector<int> sub_cols;
    sub_cols.reserve(cols.size() - 1);
    for (size_t j = 0; j < cols.size(); ++j)
      if (j != k) sub_cols.push_back(cols[j]);
    acc += m.at(r0, cols[k]) * det_recursive(m, sub_rows, sub_cols);
  }
  return acc;
}

}  // namespace detail

/// gcd over all full-size (rows x rows) minors. Intended for desk-scale
/// matrices; the cofactor expansion is exponential in the row count.
inline BinaryPoly minor_gcd(const PolyMatrix& m) {
  int r = m.rows(), n = m.cols();
  if (r > n) throw DomainError("more rows than columns");
  if (r > 6) throw BudgetError("minor enumeration too large");
  std::vector<int> all_rows(r);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  BinaryPoly g;
  std::vector<int> cols(r);
  std::iota(cols.begin(), cols.end(), 0);
  while (true) {
    BinaryPoly d = detail::det_recursive(m, all_rows, cols);
    g = BinaryPoly::gcd(g, d);
    if (g.is_one()) return g;
    // next column combination in lexicographic order
    int i = r - 1;
    while (i >= 0 && cols[i] == n - r + i) --i;
    if (i < 0) break;
    ++cols[i];
    for (int j = i + 1; j < r; ++j) cols[j] = cols[j - 1] + 1;
  }
  return g;
}

struct CanonicityReport {
  bool canonical = false;
  bool row_reduced = false;
  bool basic = false;
  std::string detail;  // human-readable reason when not canonical
};

/// A matrix is canonical when it is row-reduced (the leading-coefficient
/// matrix has full row rank) and basic (the full-size minors have gcd 1).
/// Canonical matrices admit the minimal-state realizations everything else
/// here relies on.
inline CanonicityReport is_canonical(const PolyMatrix& m) {
  if (m.rows() >= m.cols())
    throw DomainError("expected fewer rows than columns");
  auto deg = row_degrees(m);  // rejects all-zero rows
  CanonicityReport rep;
  rep.row_reduced = leading_coefficient_matrix(m).rank() == m.rows();
  BinaryPoly g = minor_gcd(m);
  rep.basic = g.is_one();
  rep.canonical = rep.row_reduced && rep.basic;
  if (rep.canonical) return rep;
  std::ostringstream why;
  if (!rep.row_reduced)
    why << "leading-coefficient matrix rank below " << m.rows();
  if (!rep.basic) {
    if (!rep.row_reduced) why << "; ";
    if (g.is_zero())
      why << "all full-size minors vanish";
    else
      why << "full-size minors share the factor " << g.to_string();
  }
  for (int r = 0; r < m.rows(); ++r) {
    int l = deg[r] >= 0 ? BinaryPoly::kMaxDegree : 0;
    for (int c = 0; c < m.cols(); ++c)
      if (!m.at(r, c).is_zero()) l = std::min(l, m.at(r, c).lowest_power());
    if (l > 0) {
      why << "; row " << (r + 1) << " has monomial factor D";
      if (l > 1) why << "^" << l;
      break;
    }
  }
  rep.detail = why.str();
  return rep;
}

/// Rewrites the rows of `m` until the matrix is canonical: strips monomial
/// factors from rows and, while the leading-coefficient matrix is rank
/// deficient, replaces the highest-degree row of a dependent set by the
/// delay-aligned sum of the set. The total row degree strictly decreases,
/// so the loop terminates. Row-space over GF(2)[D] with D invertible is
/// preserved.
///
/// `row_delays_out`, when given, accumulates per-row monomial divisions
/// D^{t_r}; it only describes the full rewrite when no cross-row
/// replacement happened, which `row_ops_used_out` reports.
inline PolyMatrix reduce_rows_to_canonical(const PolyMatrix& m,
                                           std::vector<int>* row_delays_out = nullptr,
                                           bool* row_ops_used_out = nullptr) {
  PolyMatrix w = m;
  std::vector<int> delays(w.rows(), 0);
  bool row_ops = false;
  while (true) {
    for (int r = 0; r < w.rows(); ++r) {
      int l = -1;
      for (int c = 0; c < w.cols(); ++c) {
        if (w.at(r, c).is_zero()) continue;
        int lp = w.at(r, c).lowest_power();
        l = (l < 0) ? lp : std::min(l, lp);
      }
      if (l < 0)
        throw DomainError("row " + std::to_string(r + 1) +
                          " vanished: rows are linearly dependent");
      if (l == 0) continue;
      for (int c = 0; c < w.cols(); ++c)
        w.at(r, c) = w.at(r, c).divmod_by_monomial(l).first;
      delays[r] += l;
    }
    auto deg = row_degrees(w);
    BitMatrix lead = leading_coefficient_matrix(w);
    // Find a dependent combination of leading rows, tracking which input
    // rows each working row is composed of.
    std::vector<uint32_t> rows = lead.row_bits;
    std::vector<uint32_t> combo(w.rows());
    for (int r = 0; r < w.rows(); ++r) combo[r] = uint32_t{1} << r;
    uint32_t dependent = 0;
    int rk = 0;
    for (int c = 0; c < lead.cols && rk < lead.rows; ++c) {
      int pivot = -1;
      for (int r = rk; r < lead.rows; ++r)
        if ((rows[r] >> c) & 1) {
          pivot = r;
          break;
        }
      if (pivot < 0) continue;
      std::swap(rows[rk], rows[pivot]);
      std::swap(combo[rk], combo[pivot]);
      for (int r = rk + 1; r < lead.rows; ++r)
        if ((rows[r] >> c) & 1) {
          rows[r] ^= rows[rk];
          combo[r] ^= combo[rk];
        }
      ++rk;
    }
    for (int r = 0; r < lead.rows; ++r)
      if (rows[r] == 0) {
        dependent = combo[r];
        break;
      }
    if (dependent == 0) break;  // row-reduced and no monomial factors remain
    // Replace the highest-degree participant (largest index on ties).
    int target = -1;
    uint32_t s = dependent;
    while (s) {
      int r = std::countr_zero(s);
      s &= s - 1;
      if (target < 0 || deg[r] >= deg[target]) target = r;
    }
    PolyMatrix next = w;
    for (int c = 0; c < w.cols(); ++c) {
      BinaryPoly acc;
      uint32_t t = dependent;
      while (t) {
        int r = std::countr_zero(t);
        t &= t - 1;
        acc += BinaryPoly::monomial(deg[target] - deg[r]) * w.at(r, c);
      }
      next.at(target, c) = acc;
    }
    w = next;
    row_ops = true;
  }
  if (row_delays_out) *row_delays_out = delays;
  if (row_ops_used_out) *row_ops_used_out = row_ops;
  return w;
}

// ---------------------------------------------------------------------------
// Text format: one matrix row per line, entries separated by commas, each
// entry an ascending sum of monomials such as "1+D+D^2". Blank lines and
// lines starting with '#' are skipped. Whitespace is insignificant.

namespace detail {

inline BinaryPoly parse_poly_token(std::string_view tok, int line, int col_base) {
  uint64_t bits = 0;
  size_t i = 0;
  auto err = [&](const std::string& msg, size_t at) -> ParseError {
    return ParseError(msg, line, col_base + int(at));
  };
  bool expect_term = true;
  while (i < tok.size()) {
    char ch = tok[i];
    if (ch == ' ' || ch == '\t') {
      ++i;
      continue;
    }
    if (ch == '+') {
      if (expect_term) throw err("expected term before '+'", i);
      expect_term = true;
      ++i;
      continue;
    }
    if (!expect_term) throw err("expected '+' between terms", i);
    if (ch == '0') {
      ++i;
    } else if (ch == '1') {
      bits ^= 1;
      ++i;
    } else if (ch == 'D') {
      ++i;
      int e = 1;
      if (i < tok.size() && tok[i] == '^') {
        ++i;
        size_t start = i;
        while (i < tok.size() && tok[i] >= '0' && tok[i] <= '9') ++i;
        if (i == start) throw err("expected exponent after '^'", i);
        e = 0;
        for (size_t k = start; k < i; ++k) {
          e = e * 10 + (tok[k] - '0');
          if (e > BinaryPoly::kMaxDegree) throw err("exponent too large", start);
        }
      }
      bits ^= uint64_t{1} << e;
    } else {
      throw err(std::string("unexpected character '") + ch + "'", i);
    }
    expect_term = false;
  }
  if (expect_term) throw err("empty polynomial term", tok.size());
  return BinaryPoly::from_coefficients(bits);
}

}  // namespace detail

/// Parse a single polynomial like "1+D+D^2".
inline BinaryPoly parse_poly(std::string_view text) {
  return detail::parse_poly_token(text, 1, 1);
}

inline PolyMatrix parse_poly_matrix(std::string_view text) {
  std::vector<std::vector<BinaryPoly>> rows;
  int line_no = 0;
  size_t pos = 0;
  int cols = -1;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    size_t first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && line[first] != '#') {
      std::vector<BinaryPoly> row;
      size_t start = 0;
      while (true) {
        size_t comma = line.find(',', start);
        std::string_view tok =
            line.substr(start, comma == std::string_view::npos
                                   ? line.size() - start
                                   : comma - start);
        row.push_back(detail::parse_poly_token(tok, line_no, int(start) + 1));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (cols < 0) {
        cols = int(row.size());
      } else if (int(row.size()) != cols) {
        throw ParseError("row has " + std::to_string(row.size()) +
                             " entries, expected " + std::to_string(cols),
                         line_no, 1);
      }
      rows.push_back(std::move(row));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (rows.empty()) throw ParseError("no matrix rows found", line_no, 1);
  PolyMatrix m(int(rows.size()), cols);
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
  return m;
}

inline std::string format_poly_matrix(const PolyMatrix& m) {
  std::string out;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out += ", ";
      out += m.at(r, c).to_string();
    }
    out += '\n';
  }
  return out;
}

}  // namespace tbt
