#pragma once

#include <bit>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tbtrellis/gf2poly.hpp"
#include "tbtrellis/sequence.hpp"
#include "tbtrellis/synformer.hpp"

namespace tbt {

/// Layout of an encoder state for a k0 x n generator matrix: per input row
/// a sliding window of the last deg_r information bits, oldest first, packed
/// row after row into a compact label of nu_enc bits. The newest bit of each
/// window is the input just consumed.
struct EncoderLayout {
  int k0 = 0;
  int nu = 0;
  std::vector<int> row_deg;
  std::vector<int> offset;  // first bit of each row window

  EncoderLayout() = default;
  explicit EncoderLayout(const PolyMatrix& g) {
    k0 = g.rows();
    row_deg = row_degrees(g);
    offset.resize(k0);
    for (int r = 0; r < k0; ++r) {
      offset[r] = nu;
      nu += row_deg[r];
    }
    if (nu > 31) throw BudgetError("encoder state too large");
  }

  /// Input bit of row r consumed `age` steps ago (age 0 = most recent).
  /// Only ages below the row degree are stored.
  int bit_index(int r, int age) const { return offset[r] + row_deg[r] - 1 - age; }

  std::string tuple_string(uint32_t state) const {
    std::string out = "(";
    for (int i = 0; i < nu; ++i) {
      if (i) out += ',';
      out += ((state >> i) & 1) ? '1' : '0';
    }
    out += ')';
    return out;
  }
};

/// One encoder section: output symbol for input `u` from `state`, then the
/// advanced state. Rows with degree 0 store nothing.
inline std::pair<uint32_t, uint32_t> encoder_step(const EncoderLayout& layout,
                                                  const CoeffExpansion& g,
                                                  uint32_t state, uint32_t u) {
  uint32_t y = g.coeff[0].left_mul(u);
  for (int i = 1; i < int(g.coeff.size()); ++i) {
    uint32_t v = 0;
    for (int r = 0; r < layout.k0; ++r)
      if (i <= layout.row_deg[r])
        v |= uint32_t((state >> layout.bit_index(r, i - 1)) & 1) << r;
    y ^= g.coeff[i].left_mul(v);
  }
  uint32_t next = 0;
  for (int r = 0; r < layout.k0; ++r) {
    if (layout.row_deg[r] == 0) continue;
    uint32_t window = (state >> layout.offset[r]) &
                      ((uint32_t{1} << layout.row_deg[r]) - 1);
    window = (window >> 1) |
             (uint32_t((u >> r) & 1) << (layout.row_deg[r] - 1));
    next |= window << layout.offset[r];
  }
  return {y, next};
}

/// Encoder state at cyclic time t for the information sequence u: per row
/// the window (u_{t-deg_r+1}, ..., u_t) read cyclically.
inline uint32_t encoder_state_at(const EncoderLayout& layout,
                                 const SymbolSequence& u, int t) {
  uint32_t state = 0;
  for (int r = 0; r < layout.k0; ++r)
    for (int age = 0; age < layout.row_deg[r]; ++age)
      if (u.bit(t - age, r + 1))
        state |= uint32_t{1} << layout.bit_index(r, age);
  return state;
}

/// Tail-biting encoding: cyclic convolution of the information sequence
/// with the generator rows. The window must cover the generator memory.
inline SymbolSequence encode_tailbiting(const PolyMatrix& g,
                                        const SymbolSequence& u) {
  if (u.width() != g.rows())
    throw DomainError("information width does not match generator rows");
  CoeffExpansion exp = expand(g);
  int N = u.length();
  if (N < exp.memory())
    throw DomainError("tail-biting window shorter than generator memory");
  SymbolSequence y(N, g.cols());
  for (int k = 1; k <= N; ++k) {
    uint32_t acc = 0;
    for (int i = 0; i <= exp.memory(); ++i)
      acc ^= exp.coeff[i].left_mul(u.symbol(k - i));
    y.set_symbol(k, acc);
  }
  return y;
}

/// All tail-biting codewords of length N, one per information sequence.
inline std::set<SymbolSequence> enumerate_tailbiting_codewords(
    const PolyMatrix& g, int N) {
  int k0 = g.rows();
  if (k0 * N > 24) throw BudgetError("codeword enumeration too large");
  CoeffExpansion exp = expand(g);
  if (N < exp.memory())
    throw DomainError("tail-biting window shorter than generator memory");
  std::set<SymbolSequence> out;
  uint32_t total = uint32_t{1} << (k0 * N);
  for (uint32_t bits = 0; bits < total; ++bits) {
    SymbolSequence u(N, k0);
    for (int k = 0; k < N; ++k)
      u.set_symbol(k + 1, (bits >> (k * k0)) & ((uint32_t{1} << k0) - 1));
    out.insert(encode_tailbiting(g, u));
  }
  return out;
}

/// G(D) H(D)^T must vanish identically for a generator/parity-check pair.
inline bool check_duality(const PolyMatrix& g, const PolyMatrix& h) {
  if (g.cols() != h.cols()) throw DomainError("generator/check column mismatch");
  if (g.rows() + h.rows() != g.cols())
    throw DomainError("generator and check ranks do not fill the column space");
  for (int r = 0; r < g.rows(); ++r)
    for (int q = 0; q < h.rows(); ++q) {
      BinaryPoly acc;
      for (int c = 0; c < g.cols(); ++c) acc += g.at(r, c) * h.at(q, c);
      if (!acc.is_zero()) return false;
    }
  return true;
}

/// State of the syndrome former after absorbing the last M output symbols
/// of an encoder path (oldest first). Codewords drive the former around a
/// closed loop, so this pins the syndrome-trellis state a code path visits.
inline uint64_t dual_state(const PolyMatrix& h,
                           std::span<const uint32_t> y_history) {
  return state_from_history(h, y_history);
}

/// Linear map from encoder states to syndrome-former state grids: the dual
/// state of the code path that is at encoder state beta. Exists whenever the
/// pair is dual and the check-side memory windows fit inside the encoder
/// windows; otherwise the symbolic reduction leaves a dangling dependency
/// on inputs the encoder state no longer remembers.
struct DualStateMap {
  StateLayout check_layout;
  EncoderLayout enc_layout;
  std::vector<uint64_t> column;  // per encoder-state bit: full state grid

  uint64_t full(uint32_t beta) const {
    uint64_t out = 0;
    while (beta) {
      int b = std::countr_zero(beta);
      beta &= beta - 1;
      out ^= column[b];
    }
    return out;
  }

  uint32_t compact(uint32_t beta) const { return check_layout.compact(full(beta)); }
};

inline DualStateMap dual_state_map(const PolyMatrix& g, const PolyMatrix& h) {
  if (!check_duality(g, h)) throw DomainError("matrices are not a dual pair");
  DualStateMap map{StateLayout(h), EncoderLayout(g), {}};
  CoeffExpansion ge = expand(g);
  CoeffExpansion he = expand(h);
  int M = map.check_layout.M;
  int MG = ge.memory();
  int W = M + MG;  // symbolic input window: ages 0..W-1
  int k0 = map.enc_layout.k0;
  if (k0 * W > 63) throw BudgetError("symbolic input window too large");
  auto var = [&](int r, int age) { return age * k0 + r; };

  // Output symbol age d as n bit-expressions over the windowed inputs.
  int n = g.cols();
  std::vector<std::vector<uint64_t>> y_expr(M, std::vector<uint64_t>(n, 0));
  for (int d = 0; d < M; ++d)
    for (int i = 0; i <= MG; ++i)
      for (int r = 0; r < k0; ++r) {
        uint32_t row = ge.coeff[i].row_bits[r];
        while (row) {
          int c = std::countr_zero(row);
          row &= row - 1;
          y_expr[d][c] ^= uint64_t{1} << var(r, d + i);
        }
      }

  // Grid slot (p,q) accumulates the contributions of the last M outputs.
  int m = h.rows();
  std::vector<uint64_t> slot_expr(size_t(M) * m, 0);
  for (int p = 1; p <= M; ++p)
    for (int d = 0; d + p <= M; ++d)
      for (int q = 0; q < m; ++q) {
        uint32_t row = he.coeff[p + d].row_bits[q];
        while (row) {
          int c = std::countr_zero(row);
          row &= row - 1;
          slot_expr[map.check_layout.slot(p, q)] ^= y_expr[d][c];
        }
      }

  // Every surviving input variable must live inside the encoder windows.
  map.column.assign(map.enc_layout.nu, 0);
  for (int p = 1; p <= M; ++p)
    for (int q = 0; q < m; ++q) {
      uint64_t expr = slot_expr[map.check_layout.slot(p, q)];
      while (expr) {
        int v = std::countr_zero(expr);
        expr &= expr - 1;
        int r = v % k0;
        int age = v / k0;
        if (age >= map.enc_layout.row_deg[r])
          throw DomainError(
              "dual state depends on inputs older than the encoder state");
        map.column[map.enc_layout.bit_index(r, age)] |=
            uint64_t{1} << map.check_layout.slot(p, q);
      }
    }
  return map;
}

}  // namespace tbt
