#include <doctest.h>

#include <random>
#include <sstream>

#include "dmt/error.hpp"
#include "dmt/frontend.hpp"
#include "dmt/kernels_embed.hpp"
#include "dmt/mapper.hpp"

using namespace dmt;

TEST_CASE("cascade plan examples") {
  CHECK(cascade_plan(18, 16).segments == std::vector<std::int64_t>{16, 2});
  CHECK(cascade_plan(5, 16).segments == std::vector<std::int64_t>{5});
  CHECK(cascade_plan(40, 16).segments == std::vector<std::int64_t>{16, 16, 8});
  CHECK(cascade_plan(-18, 16).total == 18);
  CHECK_THROWS_AS(cascade_plan(0, 16), ParameterError);
  CHECK_THROWS_AS(cascade_plan(3, 0), ParameterError);
}

TEST_CASE("property: cascade plan count, sum and bound") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    std::int64_t b = std::uniform_int_distribution<std::int64_t>(1, 64)(rng);
    std::int64_t d = std::uniform_int_distribution<std::int64_t>(1, 5000)(rng);
    auto p = cascade_plan(d, b);
    std::int64_t sum = 0, mx = 0;
    for (auto s : p.segments) {
      sum += s;
      mx = std::max(mx, s);
      REQUIRE(s > 0);
    }
    REQUIRE(p.segments.size() == static_cast<std::size_t>((d + b - 1) / b));
    REQUIRE(sum == d);
    REQUIRE(mx <= b);
  }
}

TEST_CASE("window partitions") {
  using P = std::vector<std::pair<std::int64_t, std::int64_t>>;
  CHECK(partition_windows(12, 4) == P{{0, 4}, {4, 8}, {8, 12}});
  CHECK(partition_windows(5, 5) == P{{0, 5}});
  CHECK(partition_windows(10, 4) == P{{0, 4}, {4, 8}, {8, 10}});
  CHECK_THROWS_WITH(partition_windows(10, 0), doctest::Contains("parameter error"));
  CHECK_THROWS_AS(partition_windows(10, 11), ParameterError);
}

namespace {

DataflowGraph comm_graph(std::int64_t block, std::int64_t delta, int count = 1) {
  std::string src = "kernel k { global int in[blockDim.x]; global int out[blockDim.x];\n int v = in[tid]; tagValue<v>();\n int s = 0;\n";
  for (int i = 0; i < count; ++i)
    src += " s = s + fromThreadOrConst<v, " + std::to_string(-(delta + i)) + ", 0>();\n";
  src += " out[tid] = s; }";
  return lower(parse(src), ThreadSpace{block});
}

std::vector<const Elevator*> elevators(const DataflowGraph& g) {
  std::vector<const Elevator*> out;
  for (const auto& n : g.nodes())
    if (auto* e = std::get_if<Elevator>(&n.kind)) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("expand_comm cascades long elevators") {
  GridConfig grid;
  auto ex = expand_comm(comm_graph(64, 18), grid);
  auto els = elevators(ex.graph);
  REQUIRE(els.size() == 2);
  CHECK(els[0]->shift == 16);
  CHECK(els[1]->shift == 2);
  CHECK(els[0]->role == ElevatorRole::Segment);
  CHECK(els[1]->role == ElevatorRole::Tail);
  CHECK(ex.cascades == 1);
  CHECK(validate(ex.graph).ok());

  auto same = expand_comm(comm_graph(64, 3), grid);
  CHECK(dump(same.graph) == dump(comm_graph(64, 3)));
  CHECK(same.overflow.empty());
}

TEST_CASE("expand_comm turns a long eLDST into a forwarding loop") {
  const std::string src =
      "kernel k { global int X[blockDim.x]; global int out[blockDim.x];\n"
      " out[tid] = fromThreadOrMem<-20>(X[tid], tid < 20); }";
  auto g = lower(parse(src), ThreadSpace{64});
  auto ex = expand_comm(g, GridConfig{});
  CHECK(ex.loops == 1);
  auto els = elevators(ex.graph);
  REQUIRE(els.size() == 2);
  CHECK(els[0]->shift + els[1]->shift == 20);
  CHECK(els[1]->role == ElevatorRole::LoopTail);
  std::size_t mux = 0, steer = 0;
  NodeId mux_id = kNoNode, steer_id = kNoNode;
  for (const auto& n : ex.graph.nodes())
    if (auto* c = std::get_if<Control>(&n.kind)) {
      if (c->op == Opcode::Mux) ++mux, mux_id = n.id;
      if (c->op == Opcode::Steer) ++steer, steer_id = n.id;
    }
  CHECK(mux == 1);
  CHECK(steer == 1);
  auto fb = ex.graph.driver(mux_id, 2);
  REQUIRE(fb);
  CHECK(fb->src == steer_id);
  CHECK(validate(ex.graph).ok());
}

TEST_CASE("overflowing communications spill to the LVC") {
  GridConfig grid;
  grid.control_elevator_units = 2;
  auto ex = expand_comm(comm_graph(128, 40, 2), grid);
  CHECK(ex.overflow.size() == 2);
  auto g = ex.graph;
  CHECK(spill(g, ex.overflow) == 2);
  for (auto* e : elevators(g)) CHECK(e->spilled);
  CHECK(spill(g, {}) == 0);
  auto m = place_and_route(g, grid);
  CHECK(m.spilled.size() == 2);
  CHECK(m.used_units(UnitClass::ControlElevator) == 0);
}

TEST_CASE("placement") {
  GridConfig grid;
  auto pg = lower(parse(embedded::kernels().at("prefix_sum")), ThreadSpace{64});
  auto m = place_and_route(pg, grid);
  CHECK(m.placement.size() == pg.size());
  CHECK(m.used_units(UnitClass::ControlElevator) == 1);
  CHECK(m.routes.size() == pg.edges().size());
  for (std::size_t i = 0; i < pg.size(); ++i)
    if (unit_class_of(pg.nodes()[i].kind) != UnitClass::Injector) CHECK(m.placement[i].unit >= 0);

  SUBCASE("deterministic") {
    auto m2 = place_and_route(pg, grid);
    std::ostringstream a, b;
    dump(m, pg, a);
    dump(m2, pg, b);
    CHECK(a.str() == b.str());
  }
  SUBCASE("empty graph") {
    auto e = place_and_route(DataflowGraph{ThreadSpace{4}}, grid);
    CHECK(e.placement.empty());
    CHECK(e.routes.empty());
    CHECK(e.total_hops() == 0);
  }
  SUBCASE("17 elevators on 16 units") {
    DataflowGraph g(ThreadSpace{64});
    g.add_array({"out", ScalarKind::Int, 64});
    NodeId tid = g.add_node(TidSource{});
    NodeId prev = tid;
    for (int i = 0; i < 17; ++i) {
      Elevator e;
      e.delta = TidDelta::linear_only(1);
      e.shift = 1;
      e.constant = Scalar::of_int(0);
      e.window = 64;
      NodeId n = g.add_node(e);
      g.connect(prev, 0, n, 0);
      prev = n;
    }
    NodeId sink = g.add_node(Sink{"out"});
    g.connect(tid, 0, sink, 0);
    g.connect(prev, 0, sink, 1);
    try {
      place_and_route(g, grid);
      FAIL("expected capacity error");
    } catch (const CapacityError& e) {
      CHECK(e.unit_class() == "control_elevator");
    }
  }
}

TEST_CASE("grid layout holds every unit once") {
  GridConfig grid;
  auto units = grid_layout(grid);
  CHECK(units.size() == 140);
  CHECK(grid.total_units() == 140);
  std::set<std::pair<int, int>> cells;
  for (const auto& u : units) cells.insert({u.row, u.col});
  CHECK(cells.size() == 140);
}
