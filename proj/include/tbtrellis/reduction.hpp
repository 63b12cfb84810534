#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tbtrellis/convcode.hpp"
#include "tbtrellis/gf2poly.hpp"
#include "tbtrellis/sequence.hpp"
#include "tbtrellis/synformer.hpp"
#include "tbtrellis/trellis.hpp"

namespace tbt {

// ---------------------------------------------------------------------------
// Shift plans

enum class ShiftDirection { forward, backward };

/// Per-column cyclic shifts applied to sequences. Forward moves column j
/// ahead by l_j (the new symbol k takes the old value at k - l_j); backward
/// pulls it from k + l_j.
struct SequenceShift {
  ShiftDirection direction = ShiftDirection::forward;
  std::vector<int> shifts;

  int max_shift() const {
    int m = 0;
    for (int l : shifts) m = std::max(m, l);
    return m;
  }
  bool empty() const { return max_shift() == 0; }
};

inline SymbolSequence apply_shift(const SymbolSequence& x, const SequenceShift& s,
                                  bool invert = false) {
  if (int(s.shifts.size()) > x.width())
    throw DomainError("shift plan wider than sequence");
  SymbolSequence out = x;
  bool forward = (s.direction == ShiftDirection::forward) != invert;
  for (int j = 0; j < int(s.shifts.size()); ++j) {
    int l = s.shifts[size_t(j)];
    if (l == 0) continue;
    if (l < 0) throw DomainError("negative shift");
    for (int k = 1; k <= x.length(); ++k)
      out.set_bit(k, j + 1, x.bit(forward ? k - l : k + l, j + 1));
  }
  return out;
}

inline SymbolSequence shift_sequence(const SymbolSequence& x, const SequenceShift& s) {
  return apply_shift(x, s, false);
}

/// Exact inverse of shift_sequence.
inline SymbolSequence restore_sequence(const SymbolSequence& x, const SequenceShift& s) {
  return apply_shift(x, s, true);
}

/// A reduction plan: the sequence shift together with the matrix rewrite it
/// belongs to. For forward plans the reduced matrix divides the shifted
/// columns by their monomial factors; for backward plans the columns are
/// multiplied and the rows re-canonicalized, with the per-row delays kept
/// for syndrome alignment (absent when cross-row rewrites were needed).
struct ShiftPlan {
  SequenceShift shift;
  PolyMatrix source;
  PolyMatrix reduced;
  std::optional<std::vector<int>> row_delays;
  int nu_source = 0;
  int nu_reduced = 0;
};

/// Serialized form, one line per shifted column: "column 3: forward 1".
inline std::string serialize_plan(const SequenceShift& s) {
  std::string out;
  for (int j = 0; j < int(s.shifts.size()); ++j) {
    if (s.shifts[size_t(j)] == 0) continue;
    out += "column " + std::to_string(j + 1) + ": " +
           (s.direction == ShiftDirection::forward ? "forward " : "backward ") +
           std::to_string(s.shifts[size_t(j)]) + "\n";
  }
  return out;
}

inline SequenceShift parse_plan(std::string_view text) {
  SequenceShift out;
  bool saw_any = false;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line(text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos));
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] != '#') {
      std::istringstream is(line);
      std::string kw, dir, extra;
      int col = 0, l = 0;
      char colon = 0;
      is >> kw >> col >> colon >> dir >> l;
      if (is.fail() || kw != "column" || colon != ':' ||
          (dir != "forward" && dir != "backward") || col < 1 || l < 1 ||
          bool(is >> extra))
        throw ParseError("expected 'column <j>: <direction> <shift>'", line_no, 1);
      ShiftDirection d =
          dir == "forward" ? ShiftDirection::forward : ShiftDirection::backward;
      if (saw_any && d != out.direction)
        throw ParseError("mixed shift directions in one plan", line_no, 1);
      out.direction = d;
      saw_any = true;
      if (int(out.shifts.size()) < col) out.shifts.resize(size_t(col), 0);
      if (out.shifts[size_t(col) - 1] != 0)
        throw ParseError("column " + std::to_string(col) + " listed twice", line_no, 1);
      out.shifts[size_t(col) - 1] = l;
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return out;  // empty plan allowed: identity shift
}

/// Forward plan: strip the maximal monomial factor from every column that
/// has one. Errors when nothing is reducible, when the divided matrix loses
/// canonicity, or when the state space does not shrink.
inline ShiftPlan plan_forward_reduction(const PolyMatrix& h) {
  auto rep = is_canonical(h);
  if (!rep.canonical)
    throw DomainError("matrix is not canonical: " + rep.detail);
  std::vector<int> shifts(size_t(h.cols()), 0);
  for (int c = 0; c < h.cols(); ++c) {
    bool zero_col = true;
    for (int r = 0; r < h.rows(); ++r)
      if (!h.at(r, c).is_zero()) zero_col = false;
    if (zero_col) continue;  // constrains nothing; leave unshifted
    shifts[size_t(c)] = column_monomial_factor(h, c);
  }
  SequenceShift shift{ShiftDirection::forward, shifts};
  if (shift.empty()) throw PlanError("no column has a monomial factor");
  PolyMatrix reduced = h;
  for (int c = 0; c < h.cols(); ++c) {
    if (shifts[size_t(c)] == 0) continue;
    for (int r = 0; r < h.rows(); ++r)
      reduced.at(r, c) = reduced.at(r, c).divmod_by_monomial(shifts[size_t(c)]).first;
  }
  auto rep2 = is_canonical(reduced);
  if (!rep2.canonical)
    throw PlanError("divided matrix is not canonical: " + rep2.detail);
  int nu = overall_constraint_length(h);
  int nu_red = overall_constraint_length(reduced);
  if (nu_red >= nu)
    throw PlanError("reduction does not shrink the state space (" +
                    std::to_string(nu) + " -> " + std::to_string(nu_red) + ")");
  return ShiftPlan{shift, h, reduced, std::nullopt, nu, nu_red};
}

/// Backward plan: multiply the chosen columns by the requested monomials,
/// then rewrite the rows back to canonical form. The state space may stay
/// the same size; it must not lose canonicity.
inline ShiftPlan plan_backward_reduction(const PolyMatrix& h,
                                         const std::vector<std::pair<int, int>>& delays) {
  auto rep = is_canonical(h);
  if (!rep.canonical)
    throw DomainError("matrix is not canonical: " + rep.detail);
  if (delays.empty()) throw PlanError("no columns selected");
  std::vector<int> shifts(size_t(h.cols()), 0);
  for (auto [col, l] : delays) {
    if (col < 1 || col > h.cols()) throw PlanError("column index out of range");
    if (l < 1) throw PlanError("shift must be positive");
    if (shifts[size_t(col) - 1] != 0) throw PlanError("column listed twice");
    shifts[size_t(col) - 1] = l;
  }
  PolyMatrix delayed = h;
  for (int c = 0; c < h.cols(); ++c) {
    if (shifts[size_t(c)] == 0) continue;
    BinaryPoly mono = BinaryPoly::monomial(shifts[size_t(c)]);
    for (int r = 0; r < h.rows(); ++r)
      delayed.at(r, c) = delayed.at(r, c) * mono;
  }
  std::vector<int> row_delays;
  bool row_ops = false;
  PolyMatrix reduced(1, 1);
  try {
    reduced = reduce_rows_to_canonical(delayed, &row_delays, &row_ops);
  } catch (const DomainError& e) {
    throw PlanError(std::string("re-canonicalization failed: ") + e.what());
  }
  auto rep2 = is_canonical(reduced);
  if (!rep2.canonical)
    throw PlanError("rewritten matrix is not canonical: " + rep2.detail);
  ShiftPlan plan{SequenceShift{ShiftDirection::backward, shifts},
                 h,
                 reduced,
                 std::nullopt,
                 overall_constraint_length(h),
                 overall_constraint_length(reduced)};
  if (plan.nu_reduced >= plan.nu_source)
    throw PlanError("reduction does not shrink the state space (" +
                    std::to_string(plan.nu_source) + " -> " +
                    std::to_string(plan.nu_reduced) + ")");
  if (!row_ops) plan.row_delays = row_delays;
  return plan;
}

// ---------------------------------------------------------------------------
// GF(2) linear algebra over history variables

namespace detail {

/// Reduced row echelon solver for F x = rhs over GF(2), tracking which
/// combinations of the original rows form each echelon row and which
/// combinations vanish (consistency conditions on rhs).
struct Gf2Solver {
  int nvars = 0;
  std::vector<uint64_t> rows;      // reduced echelon rows
  std::vector<uint32_t> combos;    // original-row combination per echelon row
  std::vector<int> pivots;
  std::vector<uint32_t> null_combos;
  uint64_t pivot_mask = 0;

  explicit Gf2Solver(const std::vector<uint64_t>& original, int nvars_)
      : nvars(nvars_) {
    for (size_t i = 0; i < original.size(); ++i) {
      uint64_t r = original[i];
      uint32_t c = uint32_t{1} << i;
      for (size_t j = 0; j < rows.size(); ++j)
        if ((r >> pivots[j]) & 1) {
          r ^= rows[j];
          c ^= combos[j];
        }
      if (r == 0) {
        null_combos.push_back(c);
        continue;
      }
      int p = std::countr_zero(r);
      // eliminate the new pivot from existing rows
      for (size_t j = 0; j < rows.size(); ++j)
        if ((rows[j] >> p) & 1) {
          rows[j] ^= r;
          combos[j] ^= c;
        }
      rows.push_back(r);
      combos.push_back(c);
      pivots.push_back(p);
      pivot_mask |= uint64_t{1} << p;
    }
  }

  int rank() const { return int(rows.size()); }

  /// Particular solution of F x = rhs, free variables zero.
  std::optional<uint64_t> solve(uint32_t rhs) const {
    for (uint32_t c : null_combos)
      if (std::popcount(c & rhs) & 1) return std::nullopt;
    uint64_t x = 0;
    for (size_t j = 0; j < rows.size(); ++j)
      if (std::popcount(combos[j] & rhs) & 1) x |= uint64_t{1} << pivots[j];
    return x;
  }

  /// Combination of the original rows equal to `target`, if one exists.
  std::optional<uint32_t> express(uint64_t target) const {
    uint64_t r = target;
    uint32_t c = 0;
    for (size_t j = 0; j < rows.size(); ++j)
      if ((r >> pivots[j]) & 1) {
        r ^= rows[j];
        c ^= combos[j];
      }
    if (r != 0) return std::nullopt;
    return c;
  }

  std::vector<uint64_t> kernel_basis() const {
    std::vector<uint64_t> basis;
    for (int v = 0; v < nvars; ++v) {
      if ((pivot_mask >> v) & 1) continue;
      uint64_t x = uint64_t{1} << v;
      for (size_t j = 0; j < rows.size(); ++j)
        if ((rows[j] >> v) & 1) x |= uint64_t{1} << pivots[j];
      basis.push_back(x);
    }
    return basis;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Forward embedding: relating original and reduced syndrome states

/// One forced-bit report for an admissible first segment: component
/// `column`+1 of reduced section `section` is pinned to `value`, unless the
/// start state leaves it free.
struct AdmissibleBit {
  int column = 0;   // 0-based shifted column
  int section = 0;  // 1..l_j
  bool determined = false;
  bool value = false;
};

/// One admissible tail assignment: the shifted-column bits of the first
/// sections (packed in tail-coordinate order) together with the reduced
/// start state they select.
struct TailAssignment {
  uint32_t tail_bits = 0;
  uint32_t reduced_state = 0;
};

/// Algebra connecting original states, reduced states and the cyclic tail
/// bits a forward shift wraps across the seam. Over the last-M-symbol
/// history window, the original state is a linear image F of the history
/// and the reduced state a linear image G of the same history; on top of
/// that the original state decomposes as the zero-padded reduced state plus
/// the deposits of the wrapped tail bits. Everything here is derived from
/// those three linear maps.
class ForwardEmbedding {
 public:
  ForwardEmbedding(const PolyMatrix& h, const ShiftPlan& plan)
      : layout_(h),
        layout_red_(plan.reduced),
        solver_(build_f(h, layout_), layout_.M * h.cols()) {
    if (plan.shift.direction != ShiftDirection::forward)
      throw DomainError("embedding requires a forward plan");
    if (!(plan.source == h)) throw DomainError("plan does not belong to this matrix");
    n_ = h.cols();
    shifts_ = plan.shift.shifts;

    // tail coordinates: section t of shifted column j wraps to history age l_j - t
    for (int j = 0; j < n_; ++j)
      for (int t = 1; t <= shifts_[size_t(j)]; ++t)
        tail_vars_.push_back(var(shifts_[size_t(j)] - t, j));

    // reduced-state rows over the same history window: the shifted column's
    // contributions arrive l_j sections later
    CoeffExpansion red = expand(plan.reduced);
    for (int p = 1; p <= layout_red_.M; ++p)
      for (int q = 0; q < layout_red_.m; ++q) {
        if (!layout_red_.live(p, q)) continue;
        uint64_t row = 0;
        for (int dp = 0; dp + p <= layout_red_.M; ++dp) {
          uint32_t bits = red.coeff[size_t(p + dp)].row_bits[size_t(q)];
          while (bits) {
            int j = std::countr_zero(bits);
            bits &= bits - 1;
            int age = dp + shifts_[size_t(j)];
            if (age >= layout_.M)
              throw DomainError("reduced state looks past the history window");
            row ^= uint64_t{1} << var(age, j);
          }
        }
        g_rows_.push_back(row);
      }

    // deposit of each tail variable onto the original state grid
    std::vector<uint64_t> f = build_f(h, layout_);
    for (int v : tail_vars_) {
      uint32_t col = 0;
      for (size_t i = 0; i < f.size(); ++i)
        col |= uint32_t((f[i] >> v) & 1) << i;
      tail_deposit_.push_back(col);
    }

    // the state map, when the reduced state is a function of the original
    std::vector<uint32_t> rows;
    bool ok = true;
    for (uint64_t g : g_rows_) {
      auto c = solver_.express(g);
      if (!c) {
        ok = false;
        break;
      }
      rows.push_back(*c);
    }
    if (ok) map_rows_ = std::move(rows);
  }

  const StateLayout& layout() const { return layout_; }
  const StateLayout& reduced_layout() const { return layout_red_; }
  const std::vector<int>& shifts() const { return shifts_; }
  int tail_width() const { return int(tail_vars_.size()); }

  bool map_available() const { return map_rows_.has_value(); }

  /// Linear state map original -> reduced. Unavailable when some reduced
  /// state bit is not a function of the original state.
  uint32_t map_state(uint32_t sigma) const {
    if (!map_rows_)
      throw PlanError("reduced state is not a function of the original state");
    uint32_t out = 0;
    for (size_t i = 0; i < map_rows_->size(); ++i)
      out |= uint32_t(std::popcount((*map_rows_)[i] & sigma) & 1) << i;
    return out;
  }

  /// The wrapped tail bits of every history consistent with the original
  /// state, as an affine set, each entry paired with the reduced start
  /// state it selects. Sorted by tail bits.
  std::vector<TailAssignment> tail_assignments(uint32_t sigma) const {
    auto particular = solver_.solve(sigma);
    if (!particular) throw DomainError("state is not reachable by any history");
    std::set<uint32_t> span;
    span.insert(project_tail(*particular));
    // affine set: particular projection plus the span of kernel projections
    for (uint64_t k : solver_.kernel_basis()) {
      uint32_t p = project_tail(k);
      if (p == 0) continue;
      std::set<uint32_t> grown = span;
      for (uint32_t s : span) grown.insert(s ^ p);
      span.swap(grown);
    }
    std::vector<TailAssignment> out;
    for (uint32_t t : span) out.push_back({t, reduced_state_for(sigma, t)});
    return out;
  }

  /// Determined/free report of the tail bits for one original state.
  std::vector<AdmissibleBit> admissible_segments(uint32_t sigma) const {
    auto particular = solver_.solve(sigma);
    if (!particular) throw DomainError("state is not reachable by any history");
    uint32_t fixed = project_tail(*particular);
    uint32_t free_mask = 0;
    for (uint64_t k : solver_.kernel_basis()) free_mask |= project_tail(k);
    std::vector<AdmissibleBit> out;
    int i = 0;
    for (int j = 0; j < n_; ++j)
      for (int t = 1; t <= shifts_[size_t(j)]; ++t, ++i) {
        AdmissibleBit bit;
        bit.column = j;
        bit.section = t;
        bit.determined = !((free_mask >> i) & 1);
        bit.value = (fixed >> i) & 1;
        out.push_back(bit);
      }
    return out;
  }

  /// Reduced start state selected by one tail assignment: strip the tail
  /// deposits off the original grid and read the reduced slots.
  uint32_t reduced_state_for(uint32_t sigma, uint32_t tail_bits) const {
    uint32_t stripped = sigma;
    for (size_t i = 0; i < tail_deposit_.size(); ++i)
      if ((tail_bits >> i) & 1) stripped ^= tail_deposit_[size_t(i)];
    uint64_t full = layout_.full(stripped);
    // live original slots outside the reduced pattern must have cancelled
    uint32_t out = 0;
    int i = 0;
    for (int p = 1; p <= layout_.M; ++p)
      for (int q = 0; q < layout_.m; ++q) {
        if (!layout_.live(p, q)) continue;
        bool bit = (full >> layout_.slot(p, q)) & 1;
        bool live_red = p <= layout_red_.M && layout_red_.live(p, q);
        if (live_red) {
          // reduced compact order is grid order, same as this scan
          if (bit) out |= uint32_t{1} << i;
          ++i;
        } else if (bit) {
          throw DomainError("tail assignment does not strip to a reduced state");
        }
      }
    return out;
  }

  /// Does the label prefix of a reduced path match a tail assignment? The
  /// wrapped bits sit in the first l_j sections of each shifted column.
  bool prefix_matches(const SymbolSequence& labels, uint32_t tail_bits) const {
    int i = 0;
    for (int j = 0; j < n_; ++j)
      for (int t = 1; t <= shifts_[size_t(j)]; ++t, ++i)
        if (labels.bit(t, j + 1) != bool((tail_bits >> i) & 1)) return false;
    return true;
  }

 private:
  int var(int age, int j) const { return age * n_ + j; }

  static std::vector<uint64_t> build_f(const PolyMatrix& h, const StateLayout& layout) {
    CoeffExpansion exp = expand(h);
    std::vector<uint64_t> rows;
    for (int p = 1; p <= layout.M; ++p)
      for (int q = 0; q < layout.m; ++q) {
        if (!layout.live(p, q)) continue;
        uint64_t row = 0;
        for (int d = 0; d + p <= layout.M; ++d) {
          uint32_t bits = exp.coeff[size_t(p + d)].row_bits[size_t(q)];
          while (bits) {
            int j = std::countr_zero(bits);
            bits &= bits - 1;
            row ^= uint64_t{1} << (d * h.cols() + j);
          }
        }
        rows.push_back(row);
      }
    return rows;
  }

  uint32_t project_tail(uint64_t x) const {
    uint32_t out = 0;
    for (size_t i = 0; i < tail_vars_.size(); ++i)
      out |= uint32_t((x >> tail_vars_[size_t(i)]) & 1) << i;
    return out;
  }

  StateLayout layout_;
  StateLayout layout_red_;
  detail::Gf2Solver solver_;
  int n_ = 0;
  std::vector<int> shifts_;
  std::vector<int> tail_vars_;          // tail coords (j asc, section asc)
  std::vector<uint32_t> tail_deposit_;  // per tail coord, over compact slots
  std::vector<uint64_t> g_rows_;        // reduced state rows over history vars
  std::optional<std::vector<uint32_t>> map_rows_;
};

/// Convenience wrappers over ForwardEmbedding.
inline uint32_t map_state(uint32_t sigma, const ShiftPlan& plan, const PolyMatrix& h) {
  return ForwardEmbedding(h, plan).map_state(sigma);
}

inline std::vector<AdmissibleBit> admissible_segments(uint32_t sigma,
                                                      const ShiftPlan& plan,
                                                      const PolyMatrix& h) {
  return ForwardEmbedding(h, plan).admissible_segments(sigma);
}

// ---------------------------------------------------------------------------
// Error-trellis reduction

struct ErrorTrellisReduction {
  ShiftPlan plan;
  SymbolSequence z_reduced;
  TailBitingTrellis reduced;
  TailBitingSyndrome syn_original;
  TailBitingSyndrome syn_reduced;
  std::optional<ForwardEmbedding> embedding;  // forward plans only

  /// Reduced-domain paths forming the embedded image of one original
  /// subtrellis (forward plans): paths from the selected reduced start
  /// states whose wrapped-bit prefix agrees with the tail assignment.
  std::vector<TrellisPath> embedded_paths(uint32_t sigma,
                                          size_t budget = 1u << 20) const {
    if (!embedding) throw DomainError("embedding only exists for forward plans");
    std::vector<TrellisPath> out;
    for (const TailAssignment& ta : embedding->tail_assignments(sigma))
      for (const TrellisPath& p : reduced.paths_from(ta.reduced_state, budget))
        if (embedding->prefix_matches(p.labels, ta.tail_bits)) out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// The same subtrellis pulled back to the original domain.
  PathSet restored_subtrellis(uint32_t sigma, size_t budget = 1u << 20) const {
    PathSet out;
    for (const TrellisPath& p : embedded_paths(sigma, budget))
      out.insert(restore_sequence(p.labels, plan.shift));
    return out;
  }
};

/// Reduce the error trellis of (h, z) along `plan`. The reduced trellis is
/// built for the rewritten matrix and the shifted received word; the
/// embedding data (forward plans) relates original and reduced subtrellises.
/// The wrapped seam must stay shorter than half the window so the first and
/// last sections of a shifted column do not overlap.
inline ErrorTrellisReduction reduce_error_trellis(const PolyMatrix& h,
                                                  const SymbolSequence& z,
                                                  const ShiftPlan& plan) {
  if (!(plan.source == h)) throw DomainError("plan does not belong to this matrix");
  if (z.width() != h.cols())
    throw DomainError("sequence width does not match matrix columns");
  if (2 * plan.shift.max_shift() > z.length())
    throw DomainError("shift exceeds half the tail-biting window");
  SymbolSequence z_red = shift_sequence(z, plan.shift);
  ErrorTrellisReduction out{plan,
                            z_red,
                            build_error_trellis(plan.reduced, z_red),
                            tailbiting_syndrome(h, z),
                            tailbiting_syndrome(plan.reduced, z_red),
                            std::nullopt};
  if (plan.shift.direction == ShiftDirection::forward)
    out.embedding.emplace(h, plan);
  return out;
}

// ---------------------------------------------------------------------------
// Code-trellis reduction

/// Code-side plan: the largest monomial factor shared by every reducible
/// column, applied to each of them. Output sequences are pulled backward;
/// the information sequence is untouched.
inline ShiftPlan plan_code_reduction(const PolyMatrix& g) {
  auto rep = is_canonical(g);
  if (!rep.canonical)
    throw DomainError("generator is not canonical: " + rep.detail);
  int shared = -1;
  std::vector<bool> reducible(size_t(g.cols()), false);
  for (int c = 0; c < g.cols(); ++c) {
    bool zero_col = true;
    for (int r = 0; r < g.rows(); ++r)
      if (!g.at(r, c).is_zero()) zero_col = false;
    if (zero_col) continue;
    int l = column_monomial_factor(g, c);
    if (l == 0) continue;
    reducible[size_t(c)] = true;
    shared = shared < 0 ? l : std::min(shared, l);
  }
  if (shared <= 0) throw PlanError("no column has a monomial factor");
  std::vector<int> shifts(size_t(g.cols()), 0);
  PolyMatrix reduced = g;
  for (int c = 0; c < g.cols(); ++c) {
    if (!reducible[size_t(c)]) continue;
    shifts[size_t(c)] = shared;
    for (int r = 0; r < g.rows(); ++r)
      reduced.at(r, c) = reduced.at(r, c).divmod_by_monomial(shared).first;
  }
  auto rep2 = is_canonical(reduced);
  if (!rep2.canonical)
    throw PlanError("divided generator is not canonical: " + rep2.detail);
  int nu = overall_constraint_length(g);
  int nu_red = overall_constraint_length(reduced);
  if (nu_red >= nu)
    throw PlanError("reduction does not shrink the state space (" +
                    std::to_string(nu) + " -> " + std::to_string(nu_red) + ")");
  return ShiftPlan{SequenceShift{ShiftDirection::backward, shifts},
                   g,
                   reduced,
                   std::nullopt,
                   nu,
                   nu_red};
}

/// One pinned output bit in the embedded image of a code subtrellis: in the
/// reduced trellis, component `column`+1 of section N - l_j + `section` is a
/// linear function of the original start state (mask over its bits).
struct ForcedCodeBit {
  int column = 0;
  int section = 0;  // 1..l_j, counted within the wrapped seam
  uint32_t beta_mask = 0;

  bool value(uint32_t beta) const {
    return std::popcount(beta & beta_mask) & 1;
  }
};

struct CodeTrellisReduction {
  ShiftPlan plan;
  TailBitingTrellis reduced;
  EncoderLayout layout;
  EncoderLayout layout_reduced;
  std::vector<ForcedCodeBit> forced;

  /// Reduced start state of the embedded subtrellis: each row keeps its
  /// most recent bits.
  uint32_t project_state(uint32_t beta) const {
    uint32_t out = 0;
    for (int r = 0; r < layout.k0; ++r)
      for (int age = 0; age < layout_reduced.row_deg[size_t(r)]; ++age)
        if ((beta >> layout.bit_index(r, age)) & 1)
          out |= uint32_t{1} << layout_reduced.bit_index(r, age);
    return out;
  }

  /// Reduced-domain paths of the embedded image of one original subtrellis:
  /// start at the projected state with the seam sections pinned by beta.
  std::vector<TrellisPath> embedded_paths(uint32_t beta,
                                          size_t budget = 1u << 20) const {
    std::vector<TrellisPath> out;
    int N = reduced.N;
    for (const TrellisPath& p : reduced.paths_from(project_state(beta), budget)) {
      bool ok = true;
      for (const ForcedCodeBit& fb : forced) {
        int section = N - plan.shift.shifts[size_t(fb.column)] + fb.section;
        if (p.labels.bit(section, fb.column + 1) != fb.value(beta)) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(p);
    }
    return out;
  }

  PathSet restored_subtrellis(uint32_t beta, size_t budget = 1u << 20) const {
    PathSet out;
    for (const TrellisPath& p : embedded_paths(beta, budget))
      out.insert(restore_sequence(p.labels, plan.shift));
    return out;
  }
};

/// Reduce the code trellis of g over an N-section tail-biting window. The
/// seam of a shifted column lands in the last l_j sections; those bits are
/// already encoded before the window wraps, so they are pinned by the
/// original start state alone.
inline CodeTrellisReduction reduce_code_trellis(const PolyMatrix& g, int N) {
  ShiftPlan plan = plan_code_reduction(g);
  if (2 * plan.shift.max_shift() > N)
    throw DomainError("shift exceeds half the tail-biting window");
  CodeTrellisReduction out{plan,
                           build_code_trellis(plan.reduced, N),
                           EncoderLayout(g),
                           EncoderLayout(plan.reduced),
                           {}};
  CoeffExpansion exp = expand(g);
  for (int j = 0; j < g.cols(); ++j) {
    int l = plan.shift.shifts[size_t(j)];
    for (int t = 1; t <= l; ++t) {
      // y_t^{(j)} depends only on inputs at or before time 0: every term of
      // column j has delay at least l >= t.
      ForcedCodeBit fb{j, t, 0};
      for (int i = t; i <= exp.memory(); ++i)
        for (int r = 0; r < g.rows(); ++r)
          if (exp.coeff[size_t(i)].get(r, j)) {
            int age = i - t;
            if (age >= out.layout.row_deg[size_t(r)])
              throw DomainError("seam bit depends on inputs older than the state");
            fb.beta_mask ^= uint32_t{1} << out.layout.bit_index(r, age);
          }
      out.forced.push_back(fb);
    }
  }
  return out;
}

}  // namespace tbt
