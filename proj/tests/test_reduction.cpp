#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "tbtrellis/oracle.hpp"
#include "tbtrellis/reduction.hpp"

using namespace tbt;

TEST_CASE("forward plan strips maximal column factors") {
  ShiftPlan p = plan_forward_reduction(fixtures::h1());
  CHECK(p.shift.direction == ShiftDirection::forward);
  CHECK(p.shift.shifts == std::vector<int>{0, 0, 1});
  CHECK(p.reduced == fixtures::h1_tilde());
  CHECK(p.nu_source == 2);
  CHECK(p.nu_reduced == 1);
  CHECK_FALSE(p.row_delays.has_value());

  ShiftPlan q = plan_forward_reduction(fixtures::h2());
  CHECK(q.shift.shifts == std::vector<int>{2, 0, 0});
  CHECK(q.reduced == fixtures::h2_tilde());
  CHECK(q.nu_source == 5);
  CHECK(q.nu_reduced == 3);
}

TEST_CASE("forward plan failure modes") {
  CHECK_THROWS_AS(plan_forward_reduction(fixtures::h1_tilde()), PlanError);
  CHECK_THROWS_AS(plan_forward_reduction(fixtures::g1_tilde()), PlanError);
  // dividing shifts the row degree but the constraint length stays put
  CHECK_THROWS_AS(plan_forward_reduction(parse_poly_matrix("D, 1+D")), PlanError);
  CHECK_THROWS_AS(plan_forward_reduction(fixtures::h2_delayed()), DomainError);
}

TEST_CASE("backward plan re-canonicalizes through row delays") {
  ShiftPlan p = plan_backward_reduction(fixtures::h2(), {{2, 2}, {3, 2}});
  CHECK(p.shift.direction == ShiftDirection::backward);
  CHECK(p.shift.shifts == std::vector<int>{0, 2, 2});
  CHECK(p.reduced == fixtures::h2_tilde());
  REQUIRE(p.row_delays.has_value());
  CHECK(*p.row_delays == std::vector<int>{2, 2});
  CHECK(p.nu_source == 5);
  CHECK(p.nu_reduced == 3);

  ShiftPlan q = plan_backward_reduction(fixtures::h1(), {{1, 1}, {2, 1}});
  CHECK(q.reduced == fixtures::h1_tilde());
  REQUIRE(q.row_delays.has_value());
  CHECK(*q.row_delays == std::vector<int>{1, 1});
}

TEST_CASE("backward plan failure modes") {
  CHECK_THROWS_AS(plan_backward_reduction(fixtures::h1(), {}), PlanError);
  CHECK_THROWS_AS(plan_backward_reduction(fixtures::h1(), {{4, 1}}), PlanError);
  CHECK_THROWS_AS(plan_backward_reduction(fixtures::h1(), {{1, 0}}), PlanError);
  // delaying only column 2 inflates the constraint length
  CHECK_THROWS_AS(plan_backward_reduction(fixtures::h1(), {{2, 1}}), PlanError);
}

TEST_CASE("sequence shifts move single columns around the cycle") {
  ShiftPlan p = plan_forward_reduction(fixtures::h1());
  SymbolSequence zr = shift_sequence(fixtures::z1(), p.shift);
  CHECK(zr.to_string() == "111 100 101 011");
  CHECK(restore_sequence(zr, p.shift) == fixtures::z1());
}

TEST_CASE("shift then restore is the identity") {
  std::mt19937 rng(5001);
  for (int it = 0; it < 60; ++it) {
    int width = 1 + int(rng() % 4);
    int length = 2 + int(rng() % 6);
    SymbolSequence x = fixtures::random_sequence(rng, length, width);
    SequenceShift s;
    s.direction = (rng() & 1) ? ShiftDirection::forward : ShiftDirection::backward;
    for (int j = 0; j < width; ++j) s.shifts.push_back(int(rng() % 4));
    CHECK(restore_sequence(shift_sequence(x, s), s) == x);
    CHECK(shift_sequence(restore_sequence(x, s), s) == x);
  }
}

TEST_CASE("plan text round trip") {
  ShiftPlan p = plan_forward_reduction(fixtures::h1());
  std::string text = serialize_plan(p.shift);
  CHECK(text == "column 3: forward 1\n");
  SequenceShift back = parse_plan(text);
  CHECK(back.direction == ShiftDirection::forward);
  CHECK(back.shifts == std::vector<int>{0, 0, 1});

  ShiftPlan q = plan_backward_reduction(fixtures::h2(), {{2, 2}, {3, 2}});
  CHECK(serialize_plan(q.shift) == "column 2: backward 2\ncolumn 3: backward 2\n");
  SequenceShift qb = parse_plan(serialize_plan(q.shift));
  CHECK(qb.direction == ShiftDirection::backward);
  CHECK(qb.shifts == std::vector<int>{0, 2, 2});

  CHECK(parse_plan("").shifts.empty());
  CHECK(parse_plan("# nothing\n").empty());
  CHECK_THROWS_AS(parse_plan("column 3 forward 1"), ParseError);
  CHECK_THROWS_AS(parse_plan("column 1: forward 1\ncolumn 1: forward 2\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_plan("column 1: forward 1\ncolumn 2: backward 1\n"),
                  ParseError);
}

TEST_CASE("state map of the worked example") {
  ShiftPlan p = plan_forward_reduction(fixtures::h1());
  ForwardEmbedding emb(fixtures::h1(), p);
  REQUIRE(emb.map_available());
  // the surviving slot reads the same two components before and after
  CHECK(emb.map_state(parse_state_label("(0,0)", 2)) == parse_state_label("(0)", 1));
  CHECK(emb.map_state(parse_state_label("(0,1)", 2)) == parse_state_label("(1)", 1));
  CHECK(emb.map_state(parse_state_label("(1,0)", 2)) == parse_state_label("(0)", 1));
  CHECK(emb.map_state(parse_state_label("(1,1)", 2)) == parse_state_label("(1)", 1));
}

TEST_CASE("state map of the long example") {
  ShiftPlan p = plan_forward_reduction(fixtures::h2());
  ForwardEmbedding emb(fixtures::h2(), p);
  REQUIRE(emb.map_available());
  StateLayout src(fixtures::h2());
  // bits 0..4 hold slots (1,1),(1,2),(2,1),(2,2),(3,1)
  for (uint32_t s = 0; s < 32; ++s) {
    uint32_t b = s & 1, b2 = (s >> 1) & 1, b3 = (s >> 2) & 1;
    uint32_t b4 = (s >> 3) & 1, b5 = (s >> 4) & 1;
    uint32_t expect = (b ^ b3 ^ b5) | ((b2 ^ b3 ^ b5) << 1) | ((b4 ^ b5) << 2);
    CHECK(emb.map_state(s) == expect);
  }
  // fibers all have size 2^{nu - nu_red} = 4
  std::map<uint32_t, int> fiber;
  for (uint32_t s = 0; s < 32; ++s) ++fiber[emb.map_state(s)];
  CHECK(fiber.size() == 8);
  for (auto& [k, v] : fiber) CHECK(v == 4);
}

TEST_CASE("state map is linear") {
  std::mt19937 rng(5002);
  int done = 0;
  for (int it = 0; it < 2000 && done < 50; ++it) {
    PolyMatrix h = fixtures::random_reducible(rng, 2, 3, 2);
    ShiftPlan p = plan_forward_reduction(h);
    ForwardEmbedding emb(h, p);
    if (!emb.map_available()) continue;  // map can be unsolvable; skip
    StateLayout l(h);
    uint32_t a = rng() % (1u << l.nu), b = rng() % (1u << l.nu);
    CHECK(emb.map_state(0) == 0);
    CHECK(emb.map_state(a ^ b) == (emb.map_state(a) ^ emb.map_state(b)));
    ++done;
  }
}

TEST_CASE("wrapped seam bits of the worked example") {
  ShiftPlan p = plan_forward_reduction(fixtures::h1());
  // column 3 wraps one section; its seam bit equals the first state slot
  for (uint32_t s = 0; s < 4; ++s) {
    auto bits = admissible_segments(s, p, fixtures::h1());
    REQUIRE(bits.size() == 1);
    CHECK(bits[0].column == 2);
    CHECK(bits[0].section == 1);
    CHECK(bits[0].determined);
    CHECK(bits[0].value == bool(s & 1));
  }
}

TEST_CASE("wrapped seam bits of the long example") {
  ShiftPlan p = plan_forward_reduction(fixtures::h2());
  ForwardEmbedding emb(fixtures::h2(), p);
  for (uint32_t s = 0; s < 32; ++s) {
    uint32_t s21 = (s >> 2) & 1, s31 = (s >> 4) & 1;
    auto bits = emb.admissible_segments(s);
    REQUIRE(bits.size() == 2);
    CHECK(bits[0].column == 0);
    CHECK(bits[0].section == 1);
    CHECK(bits[0].determined);
    CHECK(bits[0].value == bool(s21 ^ s31));
    CHECK(bits[1].section == 2);
    CHECK(bits[1].determined);
    CHECK(bits[1].value == bool(s31));

    auto tails = emb.tail_assignments(s);
    REQUIRE(tails.size() == 1);
    CHECK(tails[0].tail_bits == ((s21 ^ s31) | (s31 << 1)));
    CHECK(emb.map_state(s) == tails[0].reduced_state);
  }
}

TEST_CASE("seam bits agree with brute-forced histories") {
  // every history window reaching sigma must show exactly the admissible
  // wrapped bits the embedding predicts
  std::mt19937 rng(5003);
  int done = 0;
  for (int it = 0; it < 2000 && done < 25; ++it) {
    PolyMatrix h = fixtures::random_reducible(rng, 2, 3, 2);
    StateLayout l(h);
    if (l.M * h.cols() > 12) continue;
    ShiftPlan p = plan_forward_reduction(h);
    ForwardEmbedding emb(h, p);

    // collect, per reachable state, the set of projected tail values
    std::map<uint32_t, std::set<uint32_t>> seen;
    int hist_bits = l.M * h.cols();
    for (uint64_t w = 0; w < (uint64_t(1) << hist_bits); ++w) {
      std::vector<uint32_t> hist(size_t(l.M));
      for (int i = 0; i < l.M; ++i)
        hist[size_t(i)] = uint32_t((w >> (i * h.cols())) & ((1u << h.cols()) - 1));
      uint32_t sigma = l.compact(state_from_history(h, hist));
      uint32_t tail = 0;
      int pos = 0;
      for (int j = 0; j < h.cols(); ++j)
        for (int t = 1; t <= p.shift.shifts[size_t(j)]; ++t, ++pos) {
          // history is oldest-first; section t of column j wraps in from
          // age l_j - t
          int age = p.shift.shifts[size_t(j)] - t;
          if ((hist[size_t(l.M - 1 - age)] >> j) & 1) tail |= 1u << pos;
        }
      seen[sigma].insert(tail);
    }
    for (auto& [sigma, tails] : seen) {
      auto want = emb.tail_assignments(sigma);
      std::set<uint32_t> predicted;
      for (const TailAssignment& ta : want) predicted.insert(ta.tail_bits);
      CHECK(predicted == tails);
    }
    ++done;
  }
}

TEST_CASE("error-trellis reduction of the worked example") {
  ShiftPlan p = plan_forward_reduction(fixtures::h1());
  ErrorTrellisReduction red = reduce_error_trellis(fixtures::h1(), fixtures::z1(), p);

  CHECK(red.z_reduced.to_string() == "111 100 101 011");
  CHECK(red.reduced.state_count() == 2);
  CHECK(red.syn_original.zeta.to_string() == "00 10 01 10");
  CHECK(red.syn_reduced.zeta == red.syn_original.zeta);
  StateLayout lred(fixtures::h1_tilde());
  CHECK(lred.tuple_string(red.syn_reduced.sigma_fin) == "(1)");
  REQUIRE(red.embedding.has_value());

  TailBitingTrellis orig = build_error_trellis(fixtures::h1(), fixtures::z1());
  uint32_t sigma = parse_state_label("(1,0)", 2);

  auto inside = red.embedded_paths(sigma);
  REQUIRE(inside.size() == 4);
  for (const TrellisPath& p2 : inside) {
    CHECK(p2.start == parse_state_label("(0)", 1));
    CHECK(p2.labels.bit(1, 3) == true);  // wrapped seam bit pinned to 1
  }

  PathSet restored = red.restored_subtrellis(sigma);
  PathSet want;
  for (const TrellisPath& p2 : extract_subtrellis(orig, sigma))
    want.insert(p2.labels);
  CHECK(assert_equal(want, restored).equal);
}

TEST_CASE("reduction preserves every subtrellis of the worked example") {
  ShiftPlan p = plan_forward_reduction(fixtures::h1());
  ErrorTrellisReduction red = reduce_error_trellis(fixtures::h1(), fixtures::z1(), p);
  TailBitingTrellis orig = build_error_trellis(fixtures::h1(), fixtures::z1());
  for (uint32_t sigma = 0; sigma < 4; ++sigma) {
    PathSet want;
    for (const TrellisPath& p2 : extract_subtrellis(orig, sigma))
      want.insert(p2.labels);
    CHECK(assert_equal(want, red.restored_subtrellis(sigma)).equal);
  }
}

TEST_CASE("long example reduces forward and backward to the same matrix") {
  SymbolSequence z6 = parse_symbol_sequence("101 110 001 010 111 100");
  PathSet oracle = coset_paths(fixtures::h2(),
                               tailbiting_syndrome(fixtures::h2(), z6).zeta, 6);

  ShiftPlan fwd = plan_forward_reduction(fixtures::h2());
  ErrorTrellisReduction rf = reduce_error_trellis(fixtures::h2(), z6, fwd);
  CHECK(rf.plan.reduced == fixtures::h2_tilde());
  PathSet all_restored;
  for (uint32_t sigma = 0; sigma < 32; ++sigma)
    for (const auto& e : rf.restored_subtrellis(sigma).elems)
      all_restored.insert(SymbolSequence(e, 3));
  CHECK(assert_equal(oracle, all_restored).equal);

  ShiftPlan bwd = plan_backward_reduction(fixtures::h2(), {{2, 2}, {3, 2}});
  ErrorTrellisReduction rb = reduce_error_trellis(fixtures::h2(), z6, bwd);
  CHECK(rb.plan.reduced == fixtures::h2_tilde());
  CHECK_FALSE(rb.embedding.has_value());
  CHECK_THROWS_AS(rb.embedded_paths(0), DomainError);

  // per-row syndrome alignment under the recorded delays
  REQUIRE(rb.plan.row_delays.has_value());
  const SymbolSequence& za = rb.syn_original.zeta;
  const SymbolSequence& zb = rb.syn_reduced.zeta;
  for (int q = 1; q <= 2; ++q)
    for (int k = 1; k <= 6; ++k)
      CHECK(zb.bit(k, q) == za.bit(k + (*rb.plan.row_delays)[size_t(q) - 1], q));

  // paths come back exactly under the inverse shift
  PathSet back;
  for (const TrellisPath& p2 : enumerate_paths(rb.reduced))
    back.insert(restore_sequence(p2.labels, bwd.shift));
  CHECK(assert_equal(oracle, back).equal);
}

TEST_CASE("seam must fit the window") {
  SymbolSequence z3 = parse_symbol_sequence("101 110 001");
  ShiftPlan p = plan_forward_reduction(fixtures::h2());
  CHECK_THROWS_AS(reduce_error_trellis(fixtures::h2(), z3, p), DomainError);
  SymbolSequence z4 = parse_symbol_sequence("101 110 001 010");
  CHECK_NOTHROW(reduce_error_trellis(fixtures::h2(), z4, p));
  CHECK_THROWS_AS(reduce_error_trellis(fixtures::h1(), z4, p), DomainError);
}

TEST_CASE("code reduction plan shares the smallest factor") {
  ShiftPlan p = plan_code_reduction(fixtures::g1());
  CHECK(p.shift.direction == ShiftDirection::backward);
  CHECK(p.shift.shifts == std::vector<int>{1, 1, 0});
  CHECK(p.reduced == fixtures::g1_tilde());
  CHECK(p.nu_source == 2);
  CHECK(p.nu_reduced == 1);
  CHECK_THROWS_AS(plan_code_reduction(fixtures::g1_tilde()), PlanError);
}

TEST_CASE("code-trellis reduction of the worked generator") {
  CodeTrellisReduction red = reduce_code_trellis(fixtures::g1(), 4);
  CHECK(red.reduced.state_count() == 2);

  // both shifted columns pin one seam bit linear in the start state
  REQUIRE(red.forced.size() == 2);
  CHECK(red.forced[0].column == 0);
  CHECK(red.forced[0].section == 1);
  CHECK(red.forced[1].column == 1);
  CHECK(red.forced[1].section == 1);

  uint32_t beta = parse_state_label("(1,1)", 2);
  CHECK(red.project_state(beta) == parse_state_label("(1)", 1));
  CHECK(red.forced[0].value(beta) == false);  // component 1 of section 4
  CHECK(red.forced[1].value(beta) == true);   // component 2 of section 4

  auto inside = red.embedded_paths(beta);
  CHECK(inside.size() == 4);
  for (const TrellisPath& p : inside) {
    CHECK(p.labels.bit(4, 1) == false);
    CHECK(p.labels.bit(4, 2) == true);
  }

  PathSet want;
  TailBitingTrellis orig = build_code_trellis(fixtures::g1(), 4);
  for (const TrellisPath& p : extract_subtrellis(orig, beta))
    want.insert(p.labels);
  CHECK(assert_equal(want, red.restored_subtrellis(beta)).equal);
}

TEST_CASE("code reduction preserves every subtrellis and the whole code") {
  CodeTrellisReduction red = reduce_code_trellis(fixtures::g1(), 4);
  TailBitingTrellis orig = build_code_trellis(fixtures::g1(), 4);
  PathSet whole;
  for (uint32_t beta = 0; beta < 4; ++beta) {
    PathSet want;
    for (const TrellisPath& p : extract_subtrellis(orig, beta))
      want.insert(p.labels);
    PathSet got = red.restored_subtrellis(beta);
    CHECK(assert_equal(want, got).equal);
    for (const auto& e : got.elems) whole.insert(SymbolSequence(e, 3));
  }
  PathSet code;
  for (const SymbolSequence& y : enumerate_tailbiting_codewords(fixtures::g1(), 4))
    code.insert(y);
  CHECK(assert_equal(code, whole).equal);
}

TEST_CASE("random reducible matrices embed exactly") {
  std::mt19937 rng(5004);
  int done = 0;
  for (int it = 0; it < 2000 && done < 50; ++it) {
    PolyMatrix h = fixtures::random_reducible(rng, 2, 3, 2);
    StateLayout l(h);
    int N = std::max(4, std::max(l.M, 2 * 3));
    if (h.cols() * N > 24) continue;
    SymbolSequence z = fixtures::random_sequence(rng, N, h.cols());
    ShiftPlan p = plan_forward_reduction(h);
    if (2 * p.shift.max_shift() > N) continue;
    ErrorTrellisReduction red = reduce_error_trellis(h, z, p);
    TailBitingTrellis orig = build_error_trellis(h, z);

    // fibers of the state map partition the states when the map exists
    if (red.embedding->map_available()) {
      std::map<uint32_t, int> fiber;
      for (uint32_t s = 0; s < orig.state_count(); ++s)
        ++fiber[red.embedding->map_state(s)];
      for (auto& [k2, v] : fiber)
        CHECK(v == (1 << (p.nu_source - p.nu_reduced)));
    }

    for (uint32_t sigma = 0; sigma < orig.state_count(); ++sigma) {
      PathSet want;
      for (const TrellisPath& p2 : extract_subtrellis(orig, sigma))
        want.insert(p2.labels);
      CompareResult r = assert_equal(want, red.restored_subtrellis(sigma));
      INFO(format_poly_matrix(h) << "sigma=" << sigma << ": " << r.message);
      CHECK(r.equal);
    }
    ++done;
  }
}
