#include <doctest.h>

#include "dmt/units.hpp"

using namespace dmt;

namespace {
Token tok(Tid t, std::int64_t v) { return Token{t, Scalar::of_int(v)}; }

Elevator shift_by(std::int64_t s, std::int64_t window, std::int64_t c = 0) {
  Elevator e;
  e.delta = TidDelta::linear_only(s);
  e.shift = s;
  e.window = window;
  e.constant = Scalar::of_int(c);
  return e;
}
}  // namespace

TEST_CASE("matching store fires complete operand sets, lowest tid first") {
  MatchingStore bin(2);
  bin.insert(0, tok(3, 1));
  CHECK_FALSE(try_fire(bin));
  bin.insert(1, tok(3, 2));
  bin.insert(0, tok(5, 9));
  auto f = try_fire(bin);
  REQUIRE(f);
  CHECK(f->first == 3);
  CHECK(f->second[0]->value.i == 1);
  CHECK(f->second[1]->value.i == 2);
  CHECK(bin.residual() == 1);
  CHECK(bin.waiting() == std::vector<Tid>{5});

  MatchingStore un(1);
  un.insert(0, tok(7, 0));
  un.insert(0, tok(2, 0));
  CHECK(try_fire(un)->first == 2);
  CHECK(try_fire(un)->first == 7);
  CHECK_FALSE(un.insert(0, tok(1, 0)) == false);
  CHECK_FALSE(un.insert(0, tok(1, 0)));
}

TEST_CASE("mux fires on the selected operand only") {
  MatchingStore m(3, FireRule::Mux);
  m.insert(0, Token{4, Scalar::of_int(1)});
  CHECK_FALSE(m.ready(4));
  m.insert(2, tok(4, 8));
  CHECK_FALSE(m.ready(4));
  m.insert(1, tok(4, 6));
  CHECK(m.ready(4));
}

TEST_CASE("elevator retags forward and injects the constant for tid 0") {
  ThreadSpace s{4};
  ElevatorUnit e(shift_by(1, 4), s, 16);
  CHECK(e.injects_constant(0));
  CHECK_FALSE(e.injects_constant(1));
  auto out = elevator_step(e, tok(0, 5));
  REQUIRE(out.size() == 1);
  CHECK(out[0].tid == 1);
  CHECK(out[0].value.i == 5);
  e.inject_constant(0);
  out = elevator_step(e, std::nullopt);
  REQUIRE(out.size() == 1);
  CHECK(out[0].tid == 0);
  CHECK(out[0].value.i == 0);
  CHECK(e.constants == 1);
}

TEST_CASE("elevator drops tokens leaving the window group") {
  ThreadSpace s{8};
  ElevatorUnit e(shift_by(1, 4), s, 16);
  for (Tid t = 0; t < 8; ++t) e.offer(tok(t, t));
  std::uint64_t accepted = 0;
  while (e.has_staged()) {
    auto a = e.accept();
    accepted += a.accepted;
  }
  CHECK(e.drops == 2);  // tids 3 and 7
  CHECK(e.retags == 6);
  CHECK(e.occupancy() == 6);
  auto out = e.pop(8);
  CHECK(out.size() == 6);
  for (const auto& t : out) CHECK(t.tid % 4 != 0);
  CHECK(e.injects_constant(0));
  CHECK(e.injects_constant(4));
  CHECK(e.retag_law_ok);
}

TEST_CASE("bounded elevator refuses tokens when full") {
  ThreadSpace s{64};
  ElevatorUnit e(shift_by(1, 64), s, 2);
  for (Tid t = 0; t < 4; ++t) e.offer(tok(t, t));
  CHECK(e.accept().accepted);
  CHECK(e.accept().accepted);
  CHECK_FALSE(e.has_room());
  CHECK_FALSE(e.accept().accepted);
  CHECK(e.pop(1).size() == 1);
  CHECK_FALSE(e.has_room());
  e.release();
  CHECK(e.has_room());
  CHECK(e.accept().accepted);
  CHECK(e.max_occupancy() == 2);
}

TEST_CASE("eLDST duplicates a loaded value across the window") {
  ThreadSpace s{6};
  ELoadStore cfg{"X", TidDelta::linear_only(2), 6, 0, false};
  EldstUnit u(cfg, s, 16);
  for (Tid t = 0; t < 6; ++t) {
    u.inputs().insert(0, tok(t, t % 2));
    u.inputs().insert(1, tok(t, t < 2 ? 1 : 0));
  }
  std::vector<Tid> loads;
  for (int round = 0; round < 12; ++round) {
    auto t = u.ready_tid();
    if (!t) break;
    auto f = u.fire(*t);
    std::int64_t id = f.load ? u.new_load(f.tid) : f.load_id;
    if (f.load) loads.push_back(f.tid);
    u.consumed(id);
    u.duplicate(f.tid, f.load ? Scalar::of_int(100 + f.index) : f.value, id);
  }
  CHECK(loads == std::vector<Tid>{0, 1});
  CHECK(u.consumers_per_load() == std::vector<std::uint64_t>{3, 3});
  CHECK(u.residual() == 0);
  CHECK(u.discards == 2);
}
