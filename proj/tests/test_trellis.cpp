#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "tbtrellis/oracle.hpp"
#include "tbtrellis/trellis.hpp"

using namespace tbt;

namespace {

PathSet labels_of(const std::vector<TrellisPath>& paths) {
  PathSet out;
  for (const TrellisPath& p : paths) out.insert(p.labels);
  return out;
}

PathSet sequences(std::initializer_list<const char*> texts) {
  PathSet out;
  for (const char* t : texts) out.insert(parse_symbol_sequence(t));
  return out;
}

}  // namespace

TEST_CASE("error trellis of the worked example") {
  TailBitingTrellis t = build_error_trellis(fixtures::h1(), fixtures::z1());
  CHECK(t.kind == TrellisKind::error);
  CHECK(t.N == 4);
  CHECK(t.state_count() == 4);
  CHECK(t.state_bits == 2);
  REQUIRE(t.zeta.has_value());
  CHECK(t.zeta->to_string() == "00 10 01 10");
  CHECK(t.state_string(t.sigma_fin) == "(1,1)");
  for (int k = 1; k <= 4; ++k) {
    CHECK(t.sections[size_t(k) - 1].size() == 8);  // 2 branches per state
    for (uint32_t s = 0; s < 4; ++s) {
      auto [a, b] = t.branches_from(k, s);
      CHECK(b - a == 2);
    }
  }
}

TEST_CASE("tail-biting paths of the worked example") {
  TailBitingTrellis t = build_error_trellis(fixtures::h1(), fixtures::z1());
  auto all = enumerate_paths(t);
  CHECK(all.size() == 16);
  for (uint32_t s = 0; s < 4; ++s)
    CHECK(extract_subtrellis(t, s).size() == 4);
  // grouped by start state, sorted within groups
  for (size_t i = 1; i < all.size(); ++i)
    CHECK(all[i - 1] < all[i]);
  // paths visit their start state at both ends
  for (const TrellisPath& p : all) {
    CHECK(p.states.front() == p.start);
    CHECK(p.states.back() == p.start);
  }
}

TEST_CASE("subtrellis of the worked start state") {
  TailBitingTrellis t = build_error_trellis(fixtures::h1(), fixtures::z1());
  uint32_t s = parse_state_label("(1,0)", 2);
  PathSet got = labels_of(extract_subtrellis(t, s));
  PathSet want = sequences({"100 110 010 111", "100 111 111 001",
                            "101 010 001 001", "101 011 100 111"});
  CHECK(assert_equal(want, got).equal);
}

TEST_CASE("code trellis of the worked generator") {
  TailBitingTrellis t = build_code_trellis(fixtures::g1(), 4);
  CHECK(t.kind == TrellisKind::code);
  CHECK(t.state_count() == 4);
  auto all = enumerate_paths(t);
  CHECK(all.size() == 16);
  PathSet got = labels_of(all);
  PathSet want;
  for (const SymbolSequence& y : enumerate_tailbiting_codewords(fixtures::g1(), 4))
    want.insert(y);
  CHECK(assert_equal(want, got).equal);
}

TEST_CASE("code subtrellis carries the bold codewords") {
  TailBitingTrellis t = build_code_trellis(fixtures::g1(), 4);
  uint32_t beta = parse_state_label("(1,1)", 2);
  PathSet got = labels_of(extract_subtrellis(t, beta));
  PathSet want = sequences({"011 110 001 100", "011 111 100 010",
                            "010 011 111 100", "010 010 010 010"});
  CHECK(assert_equal(want, got).equal);
}

TEST_CASE("code and error subtrellises correspond start state by start state") {
  TailBitingTrellis code = build_code_trellis(fixtures::g1(), 4);
  TailBitingTrellis err = build_error_trellis(fixtures::h1(), fixtures::z1());
  TailBitingSyndrome syn = tailbiting_syndrome(fixtures::h1(), fixtures::z1());

  uint32_t beta = parse_state_label("(1,1)", 2);
  uint32_t sigma = error_subtrellis_state_for(beta, syn.sigma_fin, fixtures::h1(),
                                              fixtures::g1());
  CHECK(err.state_string(sigma) == "(1,0)");

  std::set<uint32_t> image;
  for (uint32_t b = 0; b < 4; ++b) {
    uint32_t s = error_subtrellis_state_for(b, syn.sigma_fin, fixtures::h1(),
                                            fixtures::g1());
    image.insert(s);
    PathSet shifted;
    for (const TrellisPath& p : extract_subtrellis(code, b))
      shifted.insert(p.labels + fixtures::z1());
    PathSet got = labels_of(extract_subtrellis(err, s));
    CHECK(assert_equal(shifted, got).equal);
  }
  CHECK(image.size() == 4);  // the correspondence is a bijection
}

TEST_CASE("error trellis of the shifted variant has two states") {
  SymbolSequence z_shift = parse_symbol_sequence("111 100 101 011");
  TailBitingTrellis t = build_error_trellis(fixtures::h1_tilde(), z_shift);
  CHECK(t.state_count() == 2);
  for (int k = 1; k <= 4; ++k) CHECK(t.sections[size_t(k) - 1].size() == 4);
  auto all = enumerate_paths(t);
  CHECK(all.size() == 16);
  CHECK(extract_subtrellis(t, 0).size() == 8);
  CHECK(extract_subtrellis(t, 1).size() == 8);
}

TEST_CASE("non-canonical matrices are rejected") {
  SymbolSequence z(6, 3);
  CHECK_THROWS_AS(build_error_trellis(fixtures::h2_delayed(), z), DomainError);
}

TEST_CASE("trellis sections are rotation covariant") {
  TailBitingTrellis t = build_error_trellis(fixtures::h1(), fixtures::z1());
  for (int r = 0; r < 4; ++r) {
    TailBitingTrellis tr = build_error_trellis(fixtures::h1(), fixtures::z1().rotated(r));
    for (int k = 1; k <= 4; ++k) {
      int kk = (k - 1 + r) % 4 + 1;
      CHECK(tr.sections[size_t(k) - 1] == t.sections[size_t(kk) - 1]);
    }
  }
}

TEST_CASE("every state fans out uniformly in a canonical error trellis") {
  std::mt19937 rng(4001);
  int done = 0;
  while (done < 20) {
    PolyMatrix h = fixtures::random_canonical(rng, 2, 3, 2);
    StateLayout l(h);
    int N = std::max(4, l.M);
    SymbolSequence z = fixtures::random_sequence(rng, N, 3);
    TailBitingTrellis t = build_error_trellis(h, z);
    for (int k = 1; k <= N; ++k)
      for (uint32_t s = 0; s < t.state_count(); ++s) {
        auto [a, b] = t.branches_from(k, s);
        CHECK(b - a == 2);  // 2^{n-m}
      }
    ++done;
  }
}

TEST_CASE("degenerate single-state code trellis") {
  TailBitingTrellis t = build_code_trellis(parse_poly_matrix("1, 1"), 1);
  CHECK(t.state_count() == 1);
  CHECK(t.state_string(0) == "()");
  auto all = enumerate_paths(t);
  CHECK(all.size() == 2);
}

TEST_CASE("path budget and unknown states") {
  TailBitingTrellis t = build_error_trellis(fixtures::h1(), fixtures::z1());
  CHECK_THROWS_AS(enumerate_paths(t, 3), BudgetError);
  CHECK_THROWS_AS(extract_subtrellis(t, 99), DomainError);
}

TEST_CASE("graph export is deterministic and marks the highlight") {
  TailBitingTrellis t = build_error_trellis(fixtures::h1(), fixtures::z1());
  std::string plain = export_graph(t);
  CHECK(plain == export_graph(t));
  CHECK(plain.find("digraph trellis") != std::string::npos);
  CHECK(plain.find("n0_1") != std::string::npos);
  CHECK(plain.find("style=bold") == std::string::npos);

  uint32_t s = parse_state_label("(1,0)", 2);
  std::string bold = export_graph(t, s);
  CHECK(bold.find("style=bold") != std::string::npos);
  // the highlighted column-0 node is bold
  CHECK(bold.find("n0_1 [label=\"(1,0)\", style=bold") != std::string::npos);
}
