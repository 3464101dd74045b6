#include <doctest.h>

#include "dmt/error.hpp"
#include "dmt/graph.hpp"

using namespace dmt;

TEST_CASE("thread space linearization round-trips") {
  ThreadSpace s{4, 3, 2};
  CHECK(s.block_size() == 24);
  for (Tid t = 0; t < s.block_size(); ++t) CHECK(s.linearize(s.delinearize(t)) == t);
  CHECK(s.linearize(Coords{1, 0, 0}) == 1);
  CHECK(s.linearize(Coords{0, 1, 0}) == 4);
  CHECK(s.linearize(Coords{0, 0, 1}) == 12);
  CHECK_THROWS_AS(s.linearize(Coords{4, 0, 0}), RangeError);
  CHECK_THROWS_AS(ThreadSpace({0}), RangeError);
  CHECK(ThreadSpace::parse("8x8") == ThreadSpace{8, 8});
  CHECK(ThreadSpace::parse("4x4x2").to_string() == "4x4x2");
}

TEST_CASE("delta linearization and range") {
  ThreadSpace s{8, 8};
  CHECK(delta_to_linear(TidDelta{{1, 0, 0}, 2}, s) == 1);
  CHECK(delta_to_linear(TidDelta{{0, -1, 0}, 2}, s) == -8);
  CHECK_THROWS_AS(delta_to_linear(TidDelta{{8, 0, 0}, 2}, s), RangeError);
}

TEST_CASE("communication targets respect every dimension and the window") {
  ThreadSpace s{4, 4};
  TidDelta right{{1, 0, 0}, 2};
  CHECK(comm_target(s, right, 16, 0) == Tid{1});
  CHECK_FALSE(comm_target(s, right, 16, 3).has_value());  // row end, not tid 4
  CHECK(comm_source(s, right, 16, 4) == std::nullopt);
  ThreadSpace line{12};
  CHECK(comm_target(line, TidDelta::linear_only(1), 4, 2) == Tid{3});
  CHECK_FALSE(comm_target(line, TidDelta::linear_only(1), 4, 3).has_value());
  CHECK_FALSE(comm_source(line, TidDelta::linear_only(1), 4, 4).has_value());
}

namespace {
DataflowGraph tiny() {
  DataflowGraph g(ThreadSpace{16});
  g.add_array({"a", ScalarKind::Int, 16});
  auto tid = g.add_node(TidSource{});
  auto ld = g.add_node(LoadStore{"a", false, 0, false, false});
  auto el = g.add_node(Elevator{TidDelta::linear_only(1), Scalar::of_int(0), 16, 1});
  auto st = g.add_node(Sink{"a", 0, false, false});
  g.connect(tid, 0, ld, 0);
  g.connect(ld, 0, el, 0);
  g.connect(tid, 0, st, 0);
  g.connect(el, 0, st, 1);
  return g;
}
}  // namespace

TEST_CASE("validate flags unordered same-array access") {
  auto g = tiny();
  auto r = validate(g);
  CHECK(r.has("memory order"));
}

TEST_CASE("validate accepts ordered graph and flags violations") {
  auto g = tiny();
  g.node(3).kind = Sink{"a", 0, false, true};
  auto sj = g.add_node(SplitJoin{1});
  g.connect(1, 1, sj, 0);
  g.connect(sj, 0, 3, 2);
  CHECK(validate(g).ok());

  SUBCASE("second elevator input") {
    g.connect(0, 0, 2, 1);
    CHECK(validate(g).has("elevator arity"));
  }
  SUBCASE("second driver on elevator") {
    g.connect(0, 0, 2, 0);
    CHECK(validate(g).has("elevator arity"));
  }
  SUBCASE("dangling") {
    g.add_node(ArithOp{Opcode::Add});
    CHECK(validate(g).has("dangling port"));
  }
  SUBCASE("window range") {
    std::get<Elevator>(g.node(2).kind).window = 17;
    CHECK(validate(g).has("window range"));
  }
  SUBCASE("delta range") {
    std::get<Elevator>(g.node(2).kind).delta = TidDelta::linear_only(16);
    CHECK(validate(g).has("delta range"));
  }
  SUBCASE("unknown array") {
    std::get<Sink>(g.node(3).kind).array = "zz";
    CHECK(validate(g).has("unknown array"));
  }
}

TEST_CASE("cycles must pass through an elevator") {
  DataflowGraph g(ThreadSpace{4});
  auto t = g.add_node(TidSource{});
  auto add = g.add_node(ArithOp{Opcode::Add});
  auto el = g.add_node(Elevator{TidDelta::linear_only(1), Scalar::of_int(0), 4, 1});
  g.connect(t, 0, add, 0);
  g.connect(add, 0, el, 0);
  g.connect(el, 0, add, 1);
  CHECK(validate(g).ok());
  g.node(el).kind = ArithOp{Opcode::Neg};
  CHECK(validate(g).has("combinational cycle"));
}

TEST_CASE("dump is deterministic") {
  auto g = tiny();
  CHECK(dump(g) == dump(tiny()));
  CHECK(dump(g).rfind("graph space=16 nodes=4 edges=4\n", 0) == 0);
}
