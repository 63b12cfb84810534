#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tbtrellis/gf2poly.hpp"
#include "tbtrellis/sequence.hpp"

namespace tbt {

/// Canonical container for comparing path or codeword collections: the
/// label sequences as sorted symbol-mask vectors, shape attached.
struct PathSet {
  int length = 0;
  int width = 0;
  std::set<std::vector<uint32_t>> elems;

  void insert(const SymbolSequence& s) {
    if (length == 0 && width == 0 && elems.empty()) {
      length = s.length();
      width = s.width();
    }
    if (s.length() != length || s.width() != width)
      throw DomainError("path set shape mismatch");
    elems.insert(s.symbols());
  }

  size_t size() const { return elems.size(); }

  bool contains(const SymbolSequence& s) const {
    return elems.count(s.symbols()) > 0;
  }

  friend bool operator==(const PathSet& a, const PathSet& b) {
    return a.length == b.length && a.width == b.width && a.elems == b.elems;
  }
};

inline std::string format_symbols(const std::vector<uint32_t>& syms, int width) {
  std::string out;
  for (size_t i = 0; i < syms.size(); ++i) {
    if (i) out += ' ';
    for (int j = 0; j < width; ++j) out += ((syms[i] >> j) & 1) ? '1' : '0';
  }
  return out;
}

/// Exhaustive reference for everything trellis-sided: the set of length-N
/// sequences whose cyclic convolution with the check rows reproduces zeta.
/// Evaluates the convolution directly from the coefficient matrices; shares
/// nothing with the syndrome-former or trellis machinery.
///
/// The search walks symbols in ascending value and prunes on every syndrome
/// position whose cyclic window is already fixed.
inline PathSet coset_paths(const PolyMatrix& h, const SymbolSequence& zeta,
                           int N) {
  int n = h.cols();
  if (zeta.width() != h.rows())
    throw DomainError("syndrome width does not match matrix rows");
  if (zeta.length() != N) throw DomainError("syndrome length does not match N");
  if (n * N > 24) throw BudgetError("coset enumeration too large");

  CoeffExpansion exp = expand(h);
  int M = exp.memory();
  std::vector<std::vector<uint32_t>> tbl(size_t(M) + 1);
  for (int i = 0; i <= M; ++i) {
    tbl[size_t(i)].resize(size_t{1} << n);
    for (uint32_t e = 0; e < (uint32_t{1} << n); ++e)
      tbl[size_t(i)][e] = exp.coeff[size_t(i)].apply_transposed(e);
  }
  auto wrap = [N](int t) { return (t - 1 + 8 * N) % N + 1; };

  PathSet out;
  out.length = N;
  out.width = n;
  std::vector<uint32_t> syms(size_t(N), 0);
  auto syndrome_at = [&](int k) {
    uint32_t acc = 0;
    for (int i = 0; i <= M; ++i) acc ^= tbl[size_t(i)][syms[size_t(wrap(k - i)) - 1]];
    return acc;
  };
  auto search = [&](auto&& self, int t) -> void {
    if (t > N) {
      // wrapped positions: windows that reach across the tail
      for (int k = 1; k <= std::min(M, N); ++k)
        if (syndrome_at(k) != zeta.symbol(k)) return;
      out.elems.insert(syms);
      return;
    }
    for (uint32_t e = 0; e < (uint32_t{1} << n); ++e) {
      syms[size_t(t) - 1] = e;
      if (t > M && t <= N && syndrome_at(t) != zeta.symbol(t)) continue;
      self(self, t + 1);
    }
    syms[size_t(t) - 1] = 0;
  };
  search(search, 1);
  return out;
}

struct CompareResult {
  bool equal = false;
  std::string message;
};

/// Set equality with a pinpointed first difference (in ascending symbol
/// order) when the sets disagree.
inline CompareResult assert_equal(const PathSet& expected, const PathSet& actual) {
  if (expected.length != actual.length || expected.width != actual.width)
    return {false, "shape mismatch: expected " + std::to_string(expected.length) +
                       "x" + std::to_string(expected.width) + ", actual " +
                       std::to_string(actual.length) + "x" +
                       std::to_string(actual.width)};
  if (expected.elems == actual.elems)
    return {true, "sets match (" + std::to_string(expected.size()) + " sequences)"};
  for (const auto& e : expected.elems)
    if (!actual.elems.count(e))
      return {false, "missing sequence " + format_symbols(e, expected.width)};
  for (const auto& a : actual.elems)
    if (!expected.elems.count(a))
      return {false, "unexpected sequence " + format_symbols(a, expected.width)};
  return {false, "sets differ"};
}

}  // namespace tbt
