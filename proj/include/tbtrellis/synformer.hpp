#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tbtrellis/gf2poly.hpp"
#include "tbtrellis/sequence.hpp"

namespace tbt {

/// Layout of a syndrome-former state for an m x n parity-check matrix with
/// memory M and row degrees r_q. The state is an M x m grid of bits; the
/// slot at depth p (1..M) and row q holds the p-step-ahead partial syndrome
/// of row q. Slots with p > r_q are structurally zero (masked), leaving
/// exactly nu = sum r_q live slots. Compact labels pack the live slots in
/// grid order: depth-major, row-minor.
struct StateLayout {
  int m = 0;
  int M = 0;
  int nu = 0;
  std::vector<int> row_deg;
  uint64_t valid_mask = 0;

  StateLayout() = default;
  explicit StateLayout(const PolyMatrix& h) {
    m = h.rows();
    M = h.memory_length();
    row_deg = row_degrees(h);
    if (M * m > 48) throw BudgetError("state grid too large");
    for (int p = 1; p <= M; ++p)
      for (int q = 0; q < m; ++q)
        if (p <= row_deg[q]) valid_mask |= uint64_t{1} << slot(p, q);
    nu = std::popcount(valid_mask);
  }

  int slot(int p, int q) const { return (p - 1) * m + q; }
  bool live(int p, int q) const { return (valid_mask >> slot(p, q)) & 1; }

  uint32_t compact(uint64_t full) const {
    uint32_t out = 0;
    int i = 0;
    uint64_t mask = valid_mask;
    while (mask) {
      int b = std::countr_zero(mask);
      mask &= mask - 1;
      out |= uint32_t((full >> b) & 1) << i;
      ++i;
    }
    return out;
  }

  uint64_t full(uint32_t compact_bits) const {
    uint64_t out = 0;
    int i = 0;
    uint64_t mask = valid_mask;
    while (mask) {
      int b = std::countr_zero(mask);
      mask &= mask - 1;
      out |= uint64_t((compact_bits >> i) & 1) << b;
      ++i;
    }
    return out;
  }

  /// Live slots as a tuple, e.g. "(1,0)". The empty state prints "()".
  std::string tuple_string(uint32_t compact_bits) const {
    std::string out = "(";
    for (int i = 0; i < nu; ++i) {
      if (i) out += ',';
      out += ((compact_bits >> i) & 1) ? '1' : '0';
    }
    out += ')';
    return out;
  }

  friend bool operator==(const StateLayout& a, const StateLayout& b) {
    return a.m == b.m && a.M == b.M && a.row_deg == b.row_deg;
  }
};

/// Parse a state written as "(1,0)", "1,0" or "10" into a compact label.
inline uint32_t parse_state_label(std::string_view text, int nu) {
  uint32_t out = 0;
  int i = 0;
  for (size_t k = 0; k < text.size(); ++k) {
    char ch = text[k];
    if (ch == '(' || ch == ')' || ch == ',' || ch == ' ' || ch == '\t') continue;
    if (ch != '0' && ch != '1')
      throw ParseError(std::string("unexpected character '") + ch +
                           "' in state label",
                       1, int(k) + 1);
    if (i >= nu) throw ParseError("state label too long", 1, int(k) + 1);
    if (ch == '1') out |= uint32_t{1} << i;
    ++i;
  }
  if (i != nu)
    throw ParseError("state label has " + std::to_string(i) +
                         " bits, expected " + std::to_string(nu),
                     1, 1);
  return out;
}

/// Syndrome former in the observer-style realization: the state grid shifts
/// one depth step per symbol and the incoming symbol deposits its partial
/// syndromes across all depths at once.
class SyndromeFormer {
 public:
  explicit SyndromeFormer(const PolyMatrix& h)
      : exp_(expand(h)), layout_(h) {
    if (h.cols() > 16) throw BudgetError("symbol alphabet too large");
    n_ = h.cols();
    size_t count = size_t{1} << n_;
    deposit_.resize(count);
    output_.resize(count);
    for (uint32_t e = 0; e < count; ++e) {
      uint64_t dep = 0;
      for (int p = 1; p <= layout_.M; ++p)
        dep |= uint64_t(exp_.coeff[p].apply_transposed(e))
               << layout_.slot(p, 0);
      deposit_[e] = dep;
      output_[e] = exp_.coeff[0].apply_transposed(e);
    }
  }

  const StateLayout& layout() const { return layout_; }
  int symbol_width() const { return n_; }
  int syndrome_width() const { return layout_.m; }

  /// One section: emits the syndrome symbol and advances the state grid.
  /// The depth-1 slots leave through the output; depth shifts down by one;
  /// the new symbol's contributions are added at every depth.
  uint32_t step(uint64_t& state, uint32_t symbol) const {
    uint32_t zeta =
        uint32_t(state & ((uint64_t{1} << layout_.m) - 1)) ^ output_[symbol];
    state = (state >> layout_.m) ^ deposit_[symbol];
    return zeta;
  }

 private:
  CoeffExpansion exp_;
  StateLayout layout_;
  int n_ = 0;
  std::vector<uint64_t> deposit_;
  std::vector<uint32_t> output_;
};

/// State reached after feeding `history` (oldest first, exactly M symbols)
/// into a zero-initialized former, evaluated directly from the definition:
/// slot (p,q) accumulates the row-q syndrome contributions that are still
/// p steps from emission. Deliberately a separate route from step().
inline uint64_t state_from_history(const PolyMatrix& h,
                                   std::span<const uint32_t> history) {
  CoeffExpansion exp = expand(h);
  StateLayout layout(h);
  if (int(history.size()) != layout.M)
    throw DomainError("history must have exactly memory-length symbols");
  uint64_t full = 0;
  for (int p = 1; p <= layout.M; ++p) {
    uint32_t acc = 0;
    for (int d = 0; d + p <= layout.M; ++d) {
      uint32_t sym = history[history.size() - 1 - d];  // d steps back
      acc ^= exp.coeff[p + d].apply_transposed(sym);
    }
    full |= uint64_t(acc) << layout.slot(p, 0);
  }
  return full;
}

struct TailBitingSyndrome {
  uint64_t sigma_fin_full = 0;
  uint32_t sigma_fin = 0;       // compact label
  SymbolSequence zeta;          // width m, length N
};

/// Two-pass cyclic syndrome computation. Pass one runs from the zero state
/// only to learn the wrap state sigma_fin (the state depends on just the
/// last M symbols, so any initial state would do). Pass two restarts from
/// sigma_fin; its outputs are the cyclic syndrome and it must return to
/// sigma_fin, which is asserted.
inline TailBitingSyndrome tailbiting_syndrome(const PolyMatrix& h,
                                              const SymbolSequence& z) {
  if (z.width() != h.cols())
    throw DomainError("sequence width does not match matrix columns");
  SyndromeFormer former(h);
  int N = z.length();
  if (N < former.layout().M)
    throw DomainError("sequence shorter than matrix memory");
  uint64_t state = 0;
  for (int k = 1; k <= N; ++k) former.step(state, z.symbol(k));
  uint64_t sigma_fin = state;
  TailBitingSyndrome out{sigma_fin, former.layout().compact(sigma_fin),
                         SymbolSequence(N, former.syndrome_width())};
  for (int k = 1; k <= N; ++k)
    out.zeta.set_symbol(k, former.step(state, z.symbol(k)));
  if (state != sigma_fin)
    throw DomainError("cyclic syndrome pass did not close on its start state");
  return out;
}

}  // namespace tbt
