#include <doctest.h>

#include <sstream>

#include "dmt/error.hpp"
#include "dmt/kernels_embed.hpp"
#include "helpers.hpp"

using namespace dmt;
using dmt::test::ivec;
using dmt::test::run_source;

namespace {
const std::string& src(const std::string& name) { return embedded::kernels().at(name); }
}  // namespace

TEST_CASE("oracle: prefix sum of ones") {
  auto r = run_source(src("prefix_sum"), ThreadSpace{4}, {{"in", ivec({1, 1, 1, 1})}});
  CHECK(r.memory.at("out") == ivec({1, 2, 3, 4}));
}

TEST_CASE("oracle: width-3 convolution with unit weights") {
  Defines d{{"W0", Scalar::of_int(1)}, {"W1", Scalar::of_int(1)}, {"W2", Scalar::of_int(1)}};
  auto r = run_source(src("conv1d"), ThreadSpace{3}, {{"image", ivec({1, 2, 3})}}, {}, {}, d);
  CHECK(r.memory.at("result") == ivec({3, 6, 5}));
  auto n = run_source(src("conv1d_naive"), ThreadSpace{3}, {{"image", ivec({1, 2, 3})}}, {}, {}, d);
  CHECK(n.memory.at("result") == ivec({3, 6, 5}));
}

TEST_CASE("oracle: 3x3 identity times B") {
  std::vector<Scalar> id, b;
  for (int i = 0; i < 9; ++i) {
    id.push_back(Scalar::of_float(i / 3 == i % 3 ? 1.0 : 0.0));
    b.push_back(Scalar::of_float(0.25 * i - 1.0));
  }
  for (const char* k : {"matmul", "matmul_naive"}) {
    CAPTURE(k);
    auto r = run_source(src(k), ThreadSpace{3, 3}, {{"A", id}, {"B", b}}, {}, {}, {{"K", Scalar::of_int(3)}});
    CHECK(r.memory.at("C") == b);
    const auto loads = per_array_load_count(r.stats.mem, "A");
    CHECK(loads == (std::string(k) == "matmul" ? 9u : 27u));
  }
}

TEST_CASE("window: constants at group starts, drops at group ends") {
  auto in = ivec({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  auto r = run_source(src("window"), ThreadSpace{12}, {{"in", in}});
  CHECK(r.memory.at("out") == ivec({-1, 0, 1, 2, -1, 4, 5, 6, -1, 8, 9, 10}));
  CHECK(r.stats.constants == 3);
  CHECK(r.stats.drops == 3);
  REQUIRE(r.stats.audits.size() == 1);
  CHECK(r.stats.audits[0].balance() == 0);
  CHECK(r.stats.conservation_ok());
}

TEST_CASE("eLDST reuse: each load feeds win/delta threads") {
  auto r = run_source(src("eldst_reuse"), ThreadSpace{12}, {{"X", ivec({10, 20, 30, 40})}});
  CHECK(r.memory.at("out") == ivec({10, 20, 10, 20, 10, 20, 30, 40, 30, 40, 30, 40}));
  CHECK(r.stats.reuse_histogram == std::map<std::uint64_t, std::uint64_t>{{3, 4}});
  CHECK(r.stats.eldst_loads == 4);
}

TEST_CASE("eLDST with every thread enabled equals plain loads") {
  const std::string fwd =
      "kernel k { global int X[blockDim.x]; global int out[blockDim.x];\n"
      " out[tid] = fromThreadOrMem<-2, 6>(X[tid], tid >= 0); }";
  const std::string plain =
      "kernel k { global int X[blockDim.x]; global int out[blockDim.x]; out[tid] = X[tid]; }";
  auto x = ivec({5, 4, 3, 2, 1, 0, -1, -2, -3, -4, -5, -6});
  auto a = run_source(fwd, ThreadSpace{12}, {{"X", x}});
  auto b = run_source(plain, ThreadSpace{12}, {{"X", x}});
  CHECK(a.memory == b.memory);
  CHECK(a.stats.eldst_loads == 12);
  CHECK(a.stats.eldst_discards == 12);
}

TEST_CASE("delta equal to the buffer size never overflows") {
  const auto& c = find_case("stress");
  auto r = verify(c, c.sizes.front(), 3, GridConfig{});
  CHECK(r.pass);
  CHECK(r.stats.max_buffer_occupancy <= r.stats.buffer_capacity);
  CHECK(r.stats.residual_tokens == 0);
}

TEST_CASE("spilled communication matches the unspilled result") {
  const std::string k =
      "kernel k { const D = 10000; global int in[blockDim.x]; global int out[blockDim.x];\n"
      " int v = in[tid] * 2 + 1; tagValue<v>(); out[tid] = fromThreadOrConst<v, -D, 5>(); }";
  const ThreadSpace s{10016};
  MemoryImage in{{"in", {}}};
  for (int i = 0; i < 10016; ++i) in["in"].push_back(Scalar::of_int(i % 97));
  GridConfig small;
  small.control_elevator_units = 1;
  auto spilled = run_source(k, s, in, small);
  CHECK(spilled.stats.spills == 1);
  CHECK(spilled.stats.lvc_accesses > 0);
  GridConfig wide;
  wide.token_buffer = 10000;
  auto direct = run_source(k, s, in, wide);
  CHECK(direct.stats.spills == 0);
  CHECK(spilled.memory == direct.memory);
  CHECK(spilled.memory.at("out")[0].i == 5);
  CHECK(spilled.memory.at("out")[10000].i == 1);
}

TEST_CASE("cascaded communication matches a single wide elevator") {
  const std::string k =
      "kernel k { global int in[blockDim.x]; global int out[blockDim.x];\n"
      " int v = in[tid]; tagValue<v>(); out[tid] = fromThreadOrConst<v, -40, 0>() + fromThreadOrConst<v, 18, 0>(); }";
  MemoryImage in{{"in", {}}};
  for (int i = 0; i < 128; ++i) in["in"].push_back(Scalar::of_int(i));
  auto cascaded = run_source(k, ThreadSpace{128}, in);
  GridConfig wide;
  wide.token_buffer = 64;
  auto whole = run_source(k, ThreadSpace{128}, in, wide);
  CHECK(cascaded.memory == whole.memory);
  CHECK(cascaded.stats.max_buffer_occupancy <= 16);
  CHECK(cascaded.memory.at("out")[50].i == 10 + 68);
  CHECK(cascaded.memory.at("out")[120].i == 80);
}

TEST_CASE("property: memory is independent of seed and issue limit") {
  for (const auto& c : bench_cases()) {
    const auto& size = c.sizes.front();
    const GridConfig grid = parse_grid_config(size.grid_overrides);
    auto k = compile(parse(kernel_source(c.kernel)), size.space, grid, size.defines);
    auto inputs = random_inputs(k.graph.arrays(), 11);
    auto ref = run(k, grid, inputs).memory;
    for (std::uint64_t seed = 1; seed <= 4; ++seed)
      for (std::optional<int> w : {std::optional<int>{1}, std::optional<int>{32}, std::optional<int>{}}) {
        SimOptions o;
        o.seed = seed;
        o.issue_limit = w;
        CAPTURE(c.name);
        CHECK(run(k, grid, inputs, o).memory == ref);
      }
  }
}

TEST_CASE("property: simulator agrees with the sequential interpreter") {
  for (const char* name : {"conv1d_naive", "matmul_naive"}) {
    CAPTURE(name);
    auto ast = parse(src(name));
    ThreadSpace s = std::string(name) == "conv1d_naive" ? ThreadSpace{64} : ThreadSpace{4, 4};
    auto k = compile(ast, s, GridConfig{});
    for (std::uint64_t seed : {1, 2, 3}) {
      auto in = random_inputs(k.graph.arrays(), seed);
      MemoryImage ref = prepare_memory(k.graph, in);
      interpret(ast, s, ref);
      CHECK(run(k, GridConfig{}, in).memory == ref);
    }
  }
}

TEST_CASE("simulation is deterministic and traces are stable") {
  auto k = compile_source(src("conv1d"), ThreadSpace{16}, GridConfig{});
  auto in = random_inputs(k.graph.arrays(), 5);
  std::ostringstream t1, t2;
  SimOptions o;
  o.trace = &t1;
  auto a = run(k, GridConfig{}, in, o);
  o.trace = &t2;
  auto b = run(k, GridConfig{}, in, o);
  CHECK(t1.str() == t2.str());
  CHECK(a.stats.cycles == b.stats.cycles);
  CHECK(t1.str().find(" drop node=") != std::string::npos);
}

TEST_CASE("issue limit bounds throughput on a saturating kernel") {
  auto g = saturating_graph(2048);
  GridConfig grid;
  auto m = place_and_route(g, grid);
  CHECK(m.used_units(UnitClass::Alu) == 32);
  CHECK(m.used_units(UnitClass::Special) == 12);
  auto in = random_inputs(g.arrays(), 1);
  auto fast = simulate(g, m, grid, in);
  SimOptions o;
  o.issue_limit = 32;
  auto slow = simulate(g, m, grid, in, o);
  CHECK(fast.memory == slow.memory);
  double ratio = static_cast<double>(slow.stats.cycles) / static_cast<double>(fast.stats.cycles);
  CHECK(ratio >= 4.0);
  CHECK(ratio <= 4.375 + 1e-9);
}

TEST_CASE("runtime faults and deadlocks are reported") {
  const std::string oob =
      "kernel k { global int a[blockDim.x]; global int out[blockDim.x]; out[tid] = a[tid + 1]; }";
  CHECK_THROWS_AS(run_source(oob, ThreadSpace{4}, {}), SimFault);
  SimOptions o;
  o.max_cycles = 3;
  CHECK_THROWS_AS(run_source(src("prefix_sum"), ThreadSpace{64}, {}, {}, o), DeadlockError);
}
