#include <doctest.h>

#include "dmt/error.hpp"
#include "dmt/memsys.hpp"

using namespace dmt;

namespace {
std::vector<ArrayDecl> arrays() { return {{"a", ScalarKind::Int, 1 << 16}, {"b", ScalarKind::Int, 16}}; }
}  // namespace

TEST_CASE("cold miss pays every level, reload hits L1") {
  MemConfig cfg;
  MemorySystem m(cfg, arrays());
  auto r = m.access("a", 0, false);
  CHECK(r.level == MemLevel::Dram);
  CHECK(r.latency == cfg.l1.latency + cfg.l2.latency + cfg.dram_latency);
  auto h = m.access("a", 0, false);
  CHECK(h.level == MemLevel::L1);
  CHECK(h.latency == cfg.l1.latency);
  // same line, next element
  CHECK(m.access("a", 1, false).level == MemLevel::L1);
  CHECK(m.stats().l1_hits == 2);
  CHECK(m.stats().dram_accesses == 1);
}

TEST_CASE("five lines in one 4-way set evict the LRU line") {
  MemConfig cfg;
  MemorySystem m(cfg, arrays());
  const std::int64_t per_line = cfg.l1.line_bytes / cfg.element_bytes;
  const std::int64_t stride = cfg.l1.sets() * per_line;  // same set, next tag
  for (int k = 0; k < 5; ++k) CHECK(m.access("a", k * stride, false).level != MemLevel::L1);
  auto again = m.access("a", 0, false);
  CHECK(again.level == MemLevel::L2);
  CHECK(m.access("a", 4 * stride, false).level == MemLevel::L1);
}

TEST_CASE("arrays are line-aligned in declaration order") {
  MemorySystem m(MemConfig{}, arrays());
  CHECK(m.address("a", 0) == 0);
  CHECK(m.address("a", 3) == 24);
  CHECK(m.address("b", 0) % 128 == 0);
  CHECK(m.address("b", 0) >= (1u << 16) * 8);
  CHECK_THROWS_AS(m.address("zz", 0), ParameterError);
}

TEST_CASE("per-array load counts") {
  MemorySystem m(MemConfig{}, arrays());
  m.access("a", 0, false);
  m.access("a", 5, false);
  m.access("a", 5, true);
  CHECK(per_array_load_count(m.stats(), "a") == 2);
  CHECK(per_array_load_count(m.stats(), "b") == 0);
  CHECK_THROWS_AS(per_array_load_count(m.stats(), "zz"), ParameterError);
}

TEST_CASE("write-back dirties lines, write-through does not allocate") {
  MemConfig wb;
  MemorySystem m(wb, arrays());
  m.access("a", 0, true);
  CHECK(m.access("a", 0, false).level == MemLevel::L1);

  MemConfig wt;
  wt.write_back = false;
  MemorySystem t(wt, arrays());
  t.access("a", 0, true);
  CHECK(t.access("a", 0, false).level != MemLevel::L1);
}

TEST_CASE("same-bank accesses in one cycle serialize when enabled") {
  MemConfig cfg;
  cfg.bank_conflicts = true;
  MemorySystem m(cfg, arrays());
  m.access("a", 0, false, 0);
  int first = m.access("a", 0, false, 5).latency;
  int second = m.access("a", 1, false, 5).latency;
  CHECK(first == cfg.l1.latency);
  CHECK(second > first);
  CHECK(m.stats().bank_conflicts == 1);
}
