#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tbtrellis/errors.hpp"

namespace tbt {

/// Length-N sequence of GF(2)^width symbols with cyclic time indexing.
/// Time runs 1..N; any integer index is reduced into that window, so
/// symbol(0) is symbol(N) and symbol(N+1) is symbol(1). Within a symbol,
/// bit j-1 of the mask is component j; the text form writes component 1
/// first ("110" has components 1,1,0).
class SymbolSequence {
 public:
  SymbolSequence(int length, int width)
      : width_(width), syms_(size_t(length), 0) {
    if (length < 1) throw DomainError("sequence length must be positive");
    if (width < 1 || width > 31) throw DomainError("symbol width out of range");
  }

  SymbolSequence(std::vector<uint32_t> symbols, int width)
      : width_(width), syms_(std::move(symbols)) {
    if (syms_.empty()) throw DomainError("sequence length must be positive");
    if (width < 1 || width > 31) throw DomainError("symbol width out of range");
    for (uint32_t s : syms_)
      if (s >> width) throw DomainError("symbol exceeds sequence width");
  }

  int length() const { return int(syms_.size()); }
  int width() const { return width_; }

  /// Reduce an arbitrary time index into 1..N.
  int wrap(int t) const {
    int n = length();
    int r = (t - 1) % n;
    if (r < 0) r += n;
    return r + 1;
  }

  uint32_t symbol(int t) const { return syms_[size_t(wrap(t)) - 1]; }
  void set_symbol(int t, uint32_t v) {
    if (v >> width_) throw DomainError("symbol exceeds sequence width");
    syms_[size_t(wrap(t)) - 1] = v;
  }

  /// Component j (1-based) of the symbol at cyclic time t.
  bool bit(int t, int j) const { return (symbol(t) >> (j - 1)) & 1; }
  void set_bit(int t, int j, bool v) {
    uint32_t s = symbol(t);
    uint32_t m = uint32_t{1} << (j - 1);
    set_symbol(t, v ? (s | m) : (s & ~m));
  }

  const std::vector<uint32_t>& symbols() const { return syms_; }

  friend SymbolSequence operator+(const SymbolSequence& a, const SymbolSequence& b) {
    if (a.width_ != b.width_ || a.syms_.size() != b.syms_.size())
      throw DomainError("sequence shape mismatch");
    SymbolSequence out = a;
    for (size_t i = 0; i < out.syms_.size(); ++i) out.syms_[i] ^= b.syms_[i];
    return out;
  }

  friend bool operator==(const SymbolSequence& a, const SymbolSequence& b) {
    return a.width_ == b.width_ && a.syms_ == b.syms_;
  }

  friend std::strong_ordering operator<=>(const SymbolSequence& a,
                                          const SymbolSequence& b) {
    if (auto c = a.width_ <=> b.width_; c != 0) return c;
    return a.syms_ <=> b.syms_;
  }

  /// Cyclic rotation: symbol k of the result is symbol k+shift of this.
  SymbolSequence rotated(int shift) const {
    SymbolSequence out(length(), width_);
    for (int k = 1; k <= length(); ++k) out.set_symbol(k, symbol(k + shift));
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (size_t i = 0; i < syms_.size(); ++i) {
      if (i) out += ' ';
      for (int j = 0; j < width_; ++j)
        out += ((syms_[i] >> j) & 1) ? '1' : '0';
    }
    return out;
  }

 private:
  int width_;
  std::vector<uint32_t> syms_;
};

/// Parse "110 101 101 011": symbols separated by whitespace or newlines,
/// all the same width.
inline SymbolSequence parse_symbol_sequence(std::string_view text) {
  std::vector<uint32_t> syms;
  int width = -1;
  int line = 1, col = 1;
  size_t i = 0;
  while (i <= text.size()) {
    // skip separators
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\n' || text[i] == '\r')) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
    if (i >= text.size()) break;
    int tok_line = line, tok_col = col;
    uint32_t v = 0;
    int w = 0;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t' &&
           text[i] != '\n' && text[i] != '\r') {
      char ch = text[i];
      if (ch != '0' && ch != '1')
        throw ParseError(std::string("unexpected character '") + ch +
                             "' in symbol",
                         line, col);
      if (w >= 31) throw ParseError("symbol too wide", tok_line, tok_col);
      if (ch == '1') v |= uint32_t{1} << w;
      ++w;
      ++i;
      ++col;
    }
    if (width < 0) {
      width = w;
    } else if (w != width) {
      throw ParseError("symbol width " + std::to_string(w) + " differs from " +
                           std::to_string(width),
                       tok_line, tok_col);
    }
    syms.push_back(v);
  }
  if (syms.empty()) throw ParseError("no symbols found", line, col);
  return SymbolSequence(std::move(syms), width);
}

}  // namespace tbt
