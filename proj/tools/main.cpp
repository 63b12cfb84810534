// Command-line front end: matrix diagnostics, trellis construction, trellis
// reduction and path restoration, all over the text formats of the library.
//
// Exit codes: 0 success, 1 usage, 2 parse error, 3 plan error,
// 4 verification failure, 5 domain or budget error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbtrellis/tbtrellis.hpp"

namespace {

using namespace tbt;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << content;
}

PolyMatrix load_matrix(const std::string& path) {
  return parse_poly_matrix(read_file(path));
}

SymbolSequence load_sequence(const std::string& path) {
  return parse_symbol_sequence(read_file(path));
}

/// Path files: one sequence per line, blank lines and '#' comments skipped.
std::vector<SymbolSequence> load_paths(const std::string& path) {
  std::vector<SymbolSequence> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_symbol_sequence(line));
  }
  return out;
}

int cmd_check(const std::string& matrix_path) {
  PolyMatrix m = load_matrix(matrix_path);
  std::cout << "matrix: " << m.rows() << " x " << m.cols() << "\n";
  std::cout << "memory M = " << m.memory_length() << "\n";
  std::cout << "row degrees:";
  for (int d : row_degrees(m)) std::cout << ' ' << d;
  std::cout << "\n";
  std::cout << "constraint length nu = " << overall_constraint_length(m) << "\n";
  CanonicityReport rep = is_canonical(m);
  if (rep.canonical)
    std::cout << "canonical: yes\n";
  else
    std::cout << "canonical: no (" << rep.detail << ")\n";
  return 0;
}

void print_summary(const TailBitingTrellis& t) {
  std::cout << (t.kind == TrellisKind::error ? "error" : "code")
            << " trellis: N=" << t.N << ", states=" << t.state_count()
            << ", branches per section=" << t.sections[0].size() << "\n";
  if (t.kind == TrellisKind::error) {
    std::cout << "sigma_fin = " << t.state_string(t.sigma_fin) << "\n";
    std::cout << "zeta = " << t.zeta->to_string() << "\n";
  }
}

int cmd_trellis(const std::string& matrix_path, const std::string& z_path,
                int N, const std::string& highlight,
                const std::string& export_path) {
  PolyMatrix m = load_matrix(matrix_path);
  TailBitingTrellis t = z_path.empty() ? build_code_trellis(m, N)
                                       : build_error_trellis(m, load_sequence(z_path));
  print_summary(t);

  std::optional<uint32_t> mark;
  if (!highlight.empty()) {
    mark = parse_state_label(highlight, t.state_bits);
    auto paths = extract_subtrellis(t, *mark);
    std::cout << "subtrellis at " << t.state_string(*mark) << ": "
              << paths.size() << " paths\n";
    for (const TrellisPath& p : paths)
      std::cout << "  " << p.labels.to_string() << "\n";
  }
  if (!export_path.empty()) {
    write_file(export_path, export_graph(t, mark));
    std::cout << "graph written to " << export_path << "\n";
  }
  return 0;
}

void print_plan(const ShiftPlan& plan) {
  std::cout << "plan:\n" << serialize_plan(plan.shift);
  std::cout << "reduced matrix:\n" << format_poly_matrix(plan.reduced);
  std::cout << "nu: " << plan.nu_source << " -> " << plan.nu_reduced << "\n";
}

int verify_error_reduction(const ErrorTrellisReduction& red,
                           const PolyMatrix& h, const SymbolSequence& z) {
  TailBitingTrellis orig = build_error_trellis(h, z);
  bool ok = true;
  if (red.embedding.has_value()) {
    for (uint32_t s = 0; s < orig.state_count(); ++s) {
      PathSet want;
      for (const TrellisPath& p : extract_subtrellis(orig, s))
        want.insert(p.labels);
      CompareResult r = assert_equal(want, red.restored_subtrellis(s));
      std::cout << "verify: state " << orig.state_string(s)
                << (r.equal ? " ok (" + std::to_string(want.size()) + " paths)"
                            : " MISMATCH: " + r.message)
                << "\n";
      ok = ok && r.equal;
    }
  } else {
    PathSet want, got;
    for (const TrellisPath& p : enumerate_paths(orig)) want.insert(p.labels);
    for (const TrellisPath& p : enumerate_paths(red.reduced))
      got.insert(restore_sequence(p.labels, red.plan.shift));
    CompareResult r = assert_equal(want, got);
    std::cout << "verify: restored path set "
              << (r.equal ? "matches original (" + std::to_string(want.size()) +
                                " sequences)"
                          : "MISMATCH: " + r.message)
              << "\n";
    ok = ok && r.equal;
  }
  if (h.cols() * z.length() <= 24) {
    PathSet coset = coset_paths(h, red.syn_original.zeta, z.length());
    PathSet rebuilt;
    for (const TrellisPath& p : enumerate_paths(red.reduced)) {
      SymbolSequence e = restore_sequence(p.labels, red.plan.shift);
      rebuilt.insert(e);
    }
    CompareResult r = assert_equal(coset, rebuilt);
    std::cout << "verify: coset "
              << (r.equal ? "matches oracle (" + std::to_string(coset.size()) +
                                " sequences)"
                          : "MISMATCH: " + r.message)
              << "\n";
    ok = ok && r.equal;
  }
  std::cout << (ok ? "verify: pass\n" : "verify: FAIL\n");
  return ok ? 0 : 4;
}

int cmd_reduce_error(const PolyMatrix& m, const std::string& z_path,
                     bool auto_forward,
                     const std::vector<std::pair<int, int>>& backward,
                     bool verify, const std::string& plan_out) {
  SymbolSequence z = load_sequence(z_path);
  ShiftPlan plan = auto_forward ? plan_forward_reduction(m)
                                : plan_backward_reduction(m, backward);
  ErrorTrellisReduction red = reduce_error_trellis(m, z, plan);

  print_plan(plan);
  std::cout << "z shifted: " << red.z_reduced.to_string() << "\n";
  StateLayout src(m);
  StateLayout dst(plan.reduced);
  std::cout << "sigma_fin: " << src.tuple_string(red.syn_original.sigma_fin)
            << " -> " << dst.tuple_string(red.syn_reduced.sigma_fin) << "\n";
  if (plan.shift.direction == ShiftDirection::forward) {
    std::cout << "zeta = " << red.syn_reduced.zeta.to_string()
              << " (unchanged)\n";
  } else {
    std::cout << "zeta original: " << red.syn_original.zeta.to_string() << "\n";
    std::cout << "zeta reduced:  " << red.syn_reduced.zeta.to_string() << "\n";
    if (plan.row_delays) {
      std::cout << "row delays:";
      for (int d : *plan.row_delays) std::cout << ' ' << d;
      std::cout << " (reduced syndrome row q leads the original by its delay)\n";
    } else {
      std::cout << "row delays: none (rows were recombined)\n";
    }
  }

  if (red.embedding.has_value() && src.nu <= 6) {
    const ForwardEmbedding& emb = *red.embedding;
    if (emb.map_available()) {
      std::cout << "state map:\n";
      for (uint32_t s = 0; s < (uint32_t{1} << src.nu); ++s)
        std::cout << "  " << src.tuple_string(s) << " -> "
                  << dst.tuple_string(emb.map_state(s)) << "\n";
    } else {
      std::cout << "state map: not expressible slot by slot\n";
    }
    std::cout << "wrapped sections:\n";
    for (uint32_t s = 0; s < (uint32_t{1} << src.nu); ++s) {
      std::cout << "  " << src.tuple_string(s) << ":";
      for (const AdmissibleBit& b : emb.admissible_segments(s)) {
        std::cout << " column " << b.column + 1 << " section " << b.section
                  << " = ";
        if (b.determined)
          std::cout << (b.value ? '1' : '0');
        else
          std::cout << "free";
      }
      std::cout << "\n";
    }
  }

  if (!plan_out.empty()) {
    write_file(plan_out, serialize_plan(plan.shift));
    std::cout << "plan written to " << plan_out << "\n";
  }
  if (verify) return verify_error_reduction(red, m, z);
  return 0;
}

int cmd_reduce_code(const PolyMatrix& m, int N, bool verify,
                    const std::string& plan_out) {
  CodeTrellisReduction red = reduce_code_trellis(m, N);
  print_plan(red.plan);
  std::cout << "pinned seam bits:\n";
  for (const ForcedCodeBit& fb : red.forced)
    std::cout << "  column " << fb.column + 1 << " section "
              << red.reduced.N - red.plan.shift.shifts[size_t(fb.column)] +
                     fb.section
              << " (mask " << fb.beta_mask << ")\n";
  if (!plan_out.empty()) {
    write_file(plan_out, serialize_plan(red.plan.shift));
    std::cout << "plan written to " << plan_out << "\n";
  }
  if (verify) {
    TailBitingTrellis orig = build_code_trellis(m, N);
    bool ok = true;
    for (uint32_t b = 0; b < orig.state_count(); ++b) {
      PathSet want;
      for (const TrellisPath& p : extract_subtrellis(orig, b))
        want.insert(p.labels);
      CompareResult r = assert_equal(want, red.restored_subtrellis(b));
      std::cout << "verify: state " << orig.state_string(b)
                << (r.equal ? " ok (" + std::to_string(want.size()) + " paths)"
                            : " MISMATCH: " + r.message)
                << "\n";
      ok = ok && r.equal;
    }
    std::cout << (ok ? "verify: pass\n" : "verify: FAIL\n");
    return ok ? 0 : 4;
  }
  return 0;
}

int cmd_restore(const std::string& paths_path, const std::string& plan_path,
                const std::string& out_path) {
  SequenceShift shift = parse_plan(read_file(plan_path));
  std::string out;
  for (const SymbolSequence& s : load_paths(paths_path))
    out += restore_sequence(s, shift).to_string() + "\n";
  if (out_path.empty())
    std::cout << out;
  else {
    write_file(out_path, out);
    std::cout << "paths written to " << out_path << "\n";
  }
  return 0;
}

std::vector<std::pair<int, int>> parse_backward_pairs(
    const std::vector<std::string>& args) {
  std::vector<std::pair<int, int>> out;
  for (const std::string& s : args) {
    size_t comma = s.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      out.emplace_back(std::stoi(s.substr(0, comma)),
                       std::stoi(s.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError("expected '<column>,<shift>' but got '" + s + "'", 1, 1);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail-biting trellis construction and reduction"};
  app.require_subcommand(1);

  std::string matrix_path, z_path, highlight, export_path, plan_out, out_path;
  std::string paths_path, plan_path;
  int N = 0;
  bool auto_forward = false, verify = false;
  std::vector<std::string> backward_args;

  CLI::App* check = app.add_subcommand("check", "diagnose a polynomial matrix");
  check->add_option("matrix", matrix_path, "matrix file")->required();

  CLI::App* trellis =
      app.add_subcommand("trellis", "build a tail-biting trellis");
  trellis->add_option("matrix", matrix_path, "matrix file")->required();
  auto* t_err = trellis->add_option("--error", z_path,
                                    "received sequence file (error trellis)");
  auto* t_code =
      trellis->add_option("--code", N, "window length (code trellis)");
  t_err->excludes(t_code);
  trellis->add_option("--highlight", highlight,
                      "start state whose subtrellis to list and embolden");
  trellis->add_option("--export", export_path, "graph description output file");

  CLI::App* reduce = app.add_subcommand("reduce", "reduce a trellis");
  reduce->add_option("matrix", matrix_path, "matrix file")->required();
  auto* r_err = reduce->add_option("--error", z_path,
                                   "received sequence file (error trellis)");
  auto* r_code = reduce->add_option("--code", N, "window length (code trellis)");
  r_err->excludes(r_code);
  auto* r_fwd = reduce->add_flag("--auto-forward", auto_forward,
                                 "strip maximal column factors");
  reduce->add_option("--backward", backward_args,
                     "delay column: '<column>,<shift>' (repeatable)")
      ->excludes(r_fwd);
  reduce->add_flag("--verify", verify, "check the reduction path by path");
  reduce->add_option("--plan-out", plan_out, "write the shift plan to a file");

  CLI::App* restore =
      app.add_subcommand("restore", "undo a shift plan on listed paths");
  restore->add_option("paths", paths_path, "path list file")->required();
  restore->add_option("plan", plan_path, "shift plan file")->required();
  restore->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (check->parsed()) return cmd_check(matrix_path);
    if (trellis->parsed()) {
      if (z_path.empty() && !*t_code) {
        std::cerr << "usage error: one of --error or --code is required\n";
        return 1;
      }
      return cmd_trellis(matrix_path, z_path, N, highlight, export_path);
    }
    if (reduce->parsed()) {
      PolyMatrix m = load_matrix(matrix_path);
      if (*r_code) return cmd_reduce_code(m, N, verify, plan_out);
      if (z_path.empty()) {
        std::cerr << "usage error: one of --error or --code is required\n";
        return 1;
      }
      if (!auto_forward && backward_args.empty()) {
        std::cerr
            << "usage error: one of --auto-forward or --backward is required\n";
        return 1;
      }
      return cmd_reduce_error(m, z_path, auto_forward,
                              parse_backward_pairs(backward_args), verify,
                              plan_out);
    }
    if (restore->parsed()) return cmd_restore(paths_path, plan_path, out_path);
  } catch (const tbt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << " (line " << e.line()
              << ", column " << e.col() << ")\n";
    return 2;
  } catch (const tbt::PlanError& e) {
    std::cerr << "plan error: " << e.what() << "\n";
    return 3;
  } catch (const tbt::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const tbt::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 1;
}
