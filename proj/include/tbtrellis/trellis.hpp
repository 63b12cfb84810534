#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tbtrellis/convcode.hpp"
#include "tbtrellis/gf2poly.hpp"
#include "tbtrellis/sequence.hpp"
#include "tbtrellis/synformer.hpp"

namespace tbt {

struct Branch {
  uint32_t from = 0;
  uint32_t label = 0;
  uint32_t to = 0;

  friend bool operator==(const Branch&, const Branch&) = default;
  friend auto operator<=>(const Branch&, const Branch&) = default;
};

struct TrellisPath {
  uint32_t start = 0;
  SymbolSequence labels;
  std::vector<uint32_t> states;  // visited states, size N+1, front == back

  friend bool operator==(const TrellisPath& a, const TrellisPath& b) {
    return a.start == b.start && a.labels == b.labels;
  }
  friend bool operator<(const TrellisPath& a, const TrellisPath& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.labels < b.labels;
  }
};

enum class TrellisKind { error, code };

/// Circular trellis over sections 1..N. The state set is the full compact
/// label range at every section and section k connects states[k-1] to
/// states[k]; tail-biting paths close on their start state, states[0] and
/// states[N] being the same set. Branches are sorted by (from, label).
struct TailBitingTrellis {
  TrellisKind kind = TrellisKind::error;
  int N = 0;
  int label_width = 0;
  int state_bits = 0;
  std::vector<std::vector<Branch>> sections;        // index k-1
  std::vector<std::vector<uint32_t>> from_offsets;  // per section, per state
  std::optional<SymbolSequence> zeta;               // error trellises
  uint32_t sigma_fin = 0;                           // error trellises

  uint32_t state_count() const { return uint32_t{1} << state_bits; }

  std::string state_string(uint32_t s) const {
    std::string out = "(";
    for (int i = 0; i < state_bits; ++i) {
      if (i) out += ',';
      out += ((s >> i) & 1) ? '1' : '0';
    }
    return out + ")";
  }

  /// Branches of section k (1..N) leaving state s.
  std::pair<const Branch*, const Branch*> branches_from(int k, uint32_t s) const {
    const auto& sec = sections[size_t(k) - 1];
    const auto& off = from_offsets[size_t(k) - 1];
    return {sec.data() + off[s], sec.data() + off[size_t(s) + 1]};
  }

  void seal_section(int k) {
    auto& sec = sections[size_t(k) - 1];
    std::sort(sec.begin(), sec.end());
    auto& off = from_offsets[size_t(k) - 1];
    off.assign(size_t(state_count()) + 1, 0);
    for (const Branch& b : sec) ++off[size_t(b.from) + 1];
    for (size_t i = 1; i < off.size(); ++i) off[i] += off[i - 1];
  }

  std::vector<TrellisPath> paths_from(uint32_t start, size_t budget = 1u << 20) const {
    if (start >= state_count()) throw DomainError("unknown start state");
    std::vector<TrellisPath> out;
    SymbolSequence labels(N, label_width);
    std::vector<uint32_t> visited(size_t(N) + 1, start);
    size_t work = 0;
    auto walk = [&](auto&& self, int k, uint32_t s) -> void {
      if (k > N) {
        if (s == start) {
          if (out.size() >= budget) throw BudgetError("path enumeration budget exceeded");
          out.push_back(TrellisPath{start, labels, visited});
        }
        return;
      }
      auto [it, end] = branches_from(k, s);
      for (; it != end; ++it) {
        if (++work > budget * size_t(N + 1) + (1u << 22))
          throw BudgetError("path enumeration budget exceeded");
        labels.set_symbol(k, it->label);
        visited[size_t(k)] = it->to;
        self(self, k + 1, it->to);
      }
    };
    walk(walk, 1, start);
    return out;
  }

  /// All tail-biting paths, grouped by start state, label-sorted within.
  std::vector<TrellisPath> tail_biting_paths(size_t budget = 1u << 20) const {
    std::vector<TrellisPath> out;
    for (uint32_t s = 0; s < state_count(); ++s) {
      auto part = paths_from(s, budget);
      if (out.size() + part.size() > budget)
        throw BudgetError("path enumeration budget exceeded");
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
};

/// Error trellis of the coset of received word z: states are syndrome-former
/// labels, section k keeps exactly the branches whose output matches the
/// cyclic syndrome symbol of z at time k. Every state fans out 2^{n-m} ways
/// when the check matrix is canonical.
inline TailBitingTrellis build_error_trellis(const PolyMatrix& h,
                                             const SymbolSequence& z) {
  auto rep = is_canonical(h);
  if (!rep.canonical)
    throw DomainError("check matrix is not canonical: " + rep.detail);
  TailBitingSyndrome syn = tailbiting_syndrome(h, z);
  SyndromeFormer former(h);
  const StateLayout& layout = former.layout();
  if (layout.nu > 20) throw BudgetError("trellis state space too large");

  TailBitingTrellis t;
  t.kind = TrellisKind::error;
  t.N = z.length();
  t.label_width = h.cols();
  t.state_bits = layout.nu;
  t.sections.resize(size_t(t.N));
  t.from_offsets.resize(size_t(t.N));
  t.zeta = syn.zeta;
  t.sigma_fin = syn.sigma_fin;

  uint32_t symbols = uint32_t{1} << h.cols();
  for (int k = 1; k <= t.N; ++k) {
    uint32_t want = syn.zeta.symbol(k);
    auto& sec = t.sections[size_t(k) - 1];
    for (uint32_t s = 0; s < t.state_count(); ++s) {
      uint64_t full = layout.full(s);
      for (uint32_t e = 0; e < symbols; ++e) {
        uint64_t state = full;
        uint32_t zeta = former.step(state, e);
        if (zeta == want)
          sec.push_back(Branch{s, e, layout.compact(state)});
      }
    }
    t.seal_section(k);
  }
  return t;
}

/// Code trellis: states are encoder windows, one branch per information
/// symbol, labelled with the encoder output.
inline TailBitingTrellis build_code_trellis(const PolyMatrix& g, int N) {
  CoeffExpansion exp = expand(g);
  EncoderLayout layout(g);
  if (N < exp.memory())
    throw DomainError("tail-biting window shorter than generator memory");
  if (layout.nu > 20) throw BudgetError("trellis state space too large");
  if (layout.k0 > 16) throw BudgetError("information alphabet too large");

  TailBitingTrellis t;
  t.kind = TrellisKind::code;
  t.N = N;
  t.label_width = g.cols();
  t.state_bits = layout.nu;
  t.sections.resize(size_t(N));
  t.from_offsets.resize(size_t(N));

  // Sections are identical; build one and replicate.
  std::vector<Branch> proto;
  uint32_t inputs = uint32_t{1} << layout.k0;
  for (uint32_t s = 0; s < t.state_count(); ++s)
    for (uint32_t u = 0; u < inputs; ++u) {
      auto [y, next] = encoder_step(layout, exp, s, u);
      proto.push_back(Branch{s, y, next});
    }
  for (int k = 1; k <= N; ++k) {
    t.sections[size_t(k) - 1] = proto;
    t.seal_section(k);
  }
  return t;
}

/// Tail-biting paths through one start state.
inline std::vector<TrellisPath> extract_subtrellis(const TailBitingTrellis& t,
                                                   uint32_t state,
                                                   size_t budget = 1u << 20) {
  return t.paths_from(state, budget);
}

/// All tail-biting paths grouped by start state then labels.
inline std::vector<TrellisPath> enumerate_paths(const TailBitingTrellis& t,
                                                size_t budget = 1u << 20) {
  return t.tail_biting_paths(budget);
}

/// Error-trellis start state of the subtrellis that carries z + (code
/// subtrellis of beta): the wrap syndrome state offset by the dual state of
/// the encoder window.
inline uint32_t error_subtrellis_state_for(uint32_t beta, uint32_t sigma_fin,
                                           const PolyMatrix& h,
                                           const PolyMatrix& g) {
  DualStateMap map = dual_state_map(g, h);
  return sigma_fin ^ map.compact(beta);
}

/// Graphviz export. Sections run left to right from the start column 0 to
/// the tail copy at column N; the tail-biting identification of the two
/// columns is implicit. An optional highlight bolds the subtrellis of one
/// start state.
inline std::string export_graph(const TailBitingTrellis& t,
                                std::optional<uint32_t> highlight = {},
                                size_t budget = 1u << 20) {
  std::vector<std::vector<bool>> bold_edges;
  std::vector<std::vector<bool>> bold_nodes(
      size_t(t.N) + 1, std::vector<bool>(t.state_count(), false));
  bold_edges.resize(size_t(t.N));
  for (int k = 1; k <= t.N; ++k)
    bold_edges[size_t(k) - 1].assign(t.sections[size_t(k) - 1].size(), false);
  if (highlight) {
    for (const TrellisPath& p : t.paths_from(*highlight, budget)) {
      for (int k = 0; k <= t.N; ++k) bold_nodes[size_t(k)][p.states[size_t(k)]] = true;
      for (int k = 1; k <= t.N; ++k) {
        const auto& sec = t.sections[size_t(k) - 1];
        Branch want{p.states[size_t(k) - 1], p.labels.symbol(k), p.states[size_t(k)]};
        auto it = std::lower_bound(sec.begin(), sec.end(), want);
        if (it != sec.end() && *it == want)
          bold_edges[size_t(k) - 1][size_t(it - sec.begin())] = true;
      }
    }
  }

  std::ostringstream os;
  os << "digraph trellis {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=ellipse, fontsize=10];\n";
  os << "  edge [fontsize=10];\n";
  for (int k = 0; k <= t.N; ++k) {
    os << "  { rank=same;";
    for (uint32_t s = 0; s < t.state_count(); ++s) os << " n" << k << "_" << s << ";";
    os << " }\n";
  }
  for (int k = 0; k <= t.N; ++k)
    for (uint32_t s = 0; s < t.state_count(); ++s) {
      os << "  n" << k << "_" << s << " [label=\"" << t.state_string(s) << "\"";
      if (bold_nodes[size_t(k)][s]) os << ", style=bold, penwidth=2";
      os << "];\n";
    }
  for (int k = 1; k <= t.N; ++k) {
    const auto& sec = t.sections[size_t(k) - 1];
    for (size_t i = 0; i < sec.size(); ++i) {
      const Branch& b = sec[i];
      std::string label;
      for (int j = 0; j < t.label_width; ++j)
        label += ((b.label >> j) & 1) ? '1' : '0';
      os << "  n" << (k - 1) << "_" << b.from << " -> n" << k << "_" << b.to
         << " [label=\"" << label << "\"";
      if (bold_edges[size_t(k) - 1][i]) os << ", style=bold, penwidth=2";
      os << "];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace tbt
