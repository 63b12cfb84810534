#pragma once

// Shared desk-scale fixtures: a memory-1 rate-2/3 pair, its shifted variant,
// and a memory-3 check matrix exercising multi-step shifts.

#include <random>
#include <string>

#include "tbtrellis/tbtrellis.hpp"

namespace fixtures {

inline tbt::PolyMatrix h1() {
  return tbt::parse_poly_matrix("1, 0, D\nD, 1+D, 0");
}

inline tbt::PolyMatrix h1_tilde() {
  return tbt::parse_poly_matrix("1, 0, 1\nD, 1+D, 0");
}

inline tbt::PolyMatrix g1() {
  return tbt::parse_poly_matrix("D+D^2, D^2, 1+D");
}

inline tbt::PolyMatrix g1_tilde() {
  return tbt::parse_poly_matrix("1+D, D, 1+D");
}

inline tbt::PolyMatrix h2() {
  return tbt::parse_poly_matrix("D^2+D^3, D, 1\nD^2, 1+D+D^2, D^2");
}

inline tbt::PolyMatrix h2_tilde() {
  return tbt::parse_poly_matrix("1+D, D, 1\n1, 1+D+D^2, D^2");
}

inline tbt::PolyMatrix h2_delayed() {
  return tbt::parse_poly_matrix("D^2+D^3, D^3, D^2\nD^2, D^2+D^3+D^4, D^4");
}

/// Received word of the worked memory-1 example.
inline tbt::SymbolSequence z1() {
  return tbt::parse_symbol_sequence("110 101 101 011");
}

/// Uniformly random polynomial of degree at most max_deg (possibly zero).
inline tbt::BinaryPoly random_poly(std::mt19937& rng, int max_deg) {
  std::uniform_int_distribution<uint64_t> d(0, (uint64_t{1} << (max_deg + 1)) - 1);
  return tbt::BinaryPoly::from_coefficients(d(rng));
}

inline tbt::PolyMatrix random_matrix(std::mt19937& rng, int rows, int cols,
                                     int max_deg) {
  tbt::PolyMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.at(r, c) = random_poly(rng, max_deg);
  return m;
}

/// Random canonical check matrix at desk scale.
inline tbt::PolyMatrix random_canonical(std::mt19937& rng, int rows, int cols,
                                        int max_deg) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    tbt::PolyMatrix m = random_matrix(rng, rows, cols, max_deg);
    try {
      if (tbt::is_canonical(m).canonical) return m;
    } catch (const tbt::DomainError&) {
    }
  }
  throw std::runtime_error("no canonical matrix found");
}

/// Random canonical matrix with at least one reducible column; the plan is
/// guaranteed to exist. Made by planting a monomial factor on one column of
/// a canonical matrix and rechecking.
inline tbt::PolyMatrix random_reducible(std::mt19937& rng, int rows, int cols,
                                        int max_deg) {
  std::uniform_int_distribution<int> col(0, cols - 1);
  std::uniform_int_distribution<int> power(1, 2);
  for (int attempt = 0; attempt < 20000; ++attempt) {
    tbt::PolyMatrix m = random_canonical(rng, rows, cols, max_deg);
    int c = col(rng);
    tbt::BinaryPoly mono = tbt::BinaryPoly::monomial(power(rng));
    bool zero_col = true;
    for (int r = 0; r < rows; ++r)
      if (!m.at(r, c).is_zero()) zero_col = false;
    if (zero_col) continue;
    for (int r = 0; r < rows; ++r) m.at(r, c) = m.at(r, c) * mono;
    try {
      tbt::plan_forward_reduction(m);
    } catch (const std::exception&) {
      continue;
    }
    return m;
  }
  throw std::runtime_error("no reducible matrix found");
}

inline tbt::SymbolSequence random_sequence(std::mt19937& rng, int length,
                                           int width) {
  tbt::SymbolSequence s(length, width);
  std::uniform_int_distribution<uint32_t> d(0, (uint32_t{1} << width) - 1);
  for (int k = 1; k <= length; ++k) s.set_symbol(k, d(rng));
  return s;
}

}  // namespace fixtures
