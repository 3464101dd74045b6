// Acceptance checks: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "dmt/bench.hpp"
#include "dmt/error.hpp"

using namespace dmt;

namespace {

int failures = 0;

void report(int id, const std::string& title, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS" : "FAIL") << " AC" << id << " " << title << ": " << detail << std::endl;
}

template <class F>
void guarded(int id, const std::string& title, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

const BenchSize& size_of(const BenchCase& c, const std::string& label) {
  for (const auto& s : c.sizes)
    if (s.label() == label) return s;
  throw Error(Stage::Cli, "no size " + label + " for " + c.name);
}

void ac1() {
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"prefix_sum", "64"}, {"prefix_sum", "256"}, {"conv1d", "256"}, {"matmul", "8x8 K=8"},
      {"matmul", "16x16 K=16"}, {"reduce", "128"}};
  bool ok = true;
  std::ostringstream d;
  double worst = 0;
  for (const auto& [name, label] : runs) {
    const auto& c = find_case(name);
    for (std::uint64_t seed : {1, 2, 3}) {
      auto t0 = std::chrono::steady_clock::now();
      auto r = verify(c, size_of(c, label), seed, GridConfig{});
      double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      worst = std::max(worst, dt);
      if (!r.pass || dt >= 10.0) {
        ok = false;
        d << name << " " << label << " seed " << seed << ": " << (r.pass ? "too slow" : r.message) << "; ";
      }
    }
  }
  d << runs.size() * 3 << " runs, slowest " << std::fixed << std::setprecision(3) << worst << " s";
  report(1, "oracle equivalence", ok, d.str());
}

void ac2() {
  const auto& fwd = find_case("matmul");
  const auto& naive = find_case("matmul_naive");
  bool ok = true;
  std::ostringstream d;
  for (const auto& size : fwd.sizes) {
    auto a = verify(fwd, size, 1, GridConfig{});
    auto b = verify(naive, size, 1, GridConfig{});
    const auto n = size.space.extent(1), m = size.space.extent(0), k = size.defines.at("K").as_int();
    auto fa = per_array_load_count(a.stats.mem, "A"), fb = per_array_load_count(a.stats.mem, "B");
    auto na = per_array_load_count(b.stats.mem, "A"), nb = per_array_load_count(b.stats.mem, "B");
    ok = ok && a.pass && b.pass && fa == static_cast<std::uint64_t>(n * k) && fb == static_cast<std::uint64_t>(k * m) &&
         na == static_cast<std::uint64_t>(n * m * k) && nb == na;
    d << size.label() << ": A " << fa << " vs " << na << ", B " << fb << " vs " << nb << (&size == &fwd.sizes.back() ? "" : "; ");
  }
  report(2, "matmul traffic N*K / K*M vs N*M*K", ok, d.str());
}

void ac3() {
  const auto& fwd = find_case("conv1d");
  const auto& naive = find_case("conv1d_naive");
  const auto& size = fwd.sizes.front();
  auto a = verify(fwd, size, 1, GridConfig{});
  auto b = verify(naive, size, 1, GridConfig{});
  const auto n = static_cast<std::uint64_t>(size.space.block_size());
  auto la = per_array_load_count(a.stats.mem, "image"), lb = per_array_load_count(b.stats.mem, "image");
  std::ostringstream d;
  d << "n=" << n << ": image loads " << la << " vs naive " << lb << " (3n-2=" << 3 * n - 2 << ")";
  report(3, "convolution traffic", a.pass && b.pass && la == n && lb == 3 * n - 2, d.str());
}

void ac4() {
  std::mt19937_64 rng(2024);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    auto b = std::uniform_int_distribution<std::int64_t>(1, 64)(rng);
    auto delta = std::uniform_int_distribution<std::int64_t>(1, 4096)(rng);
    auto p = cascade_plan(delta, b);
    std::int64_t sum = 0, mx = 0;
    for (auto s : p.segments) sum += s, mx = std::max(mx, s);
    if (p.segments.size() != static_cast<std::size_t>((delta + b - 1) / b) || sum != delta || mx > b) ++bad;
  }
  auto ex = cascade_plan(18, 16).segments;
  bool ex_ok = ex == std::vector<std::int64_t>{16, 2};
  std::ostringstream d;
  d << "1000 random pairs, " << bad << " violations; (18,16) -> [" << ex[0];
  for (std::size_t i = 1; i < ex.size(); ++i) d << "," << ex[i];
  d << "]";
  report(4, "cascade plan", bad == 0 && ex_ok, d.str());
}

void ac5() {
  bool ok = true;
  std::ostringstream d;
  std::size_t runs = 0;
  for (const auto& c : bench_cases()) {
    for (const auto& size : c.sizes) {
      const GridConfig grid = parse_grid_config(size.grid_overrides);
      auto k = compile(parse(kernel_source(c.kernel)), size.space, grid, size.defines);
      auto inputs = random_inputs(k.graph.arrays(), 99);
      std::optional<MemoryImage> ref;
      for (std::uint64_t seed = 1; seed <= 10; ++seed)
        for (std::optional<int> w : {std::optional<int>{1}, std::optional<int>{32}, std::optional<int>{}}) {
          SimOptions o;
          o.seed = seed;
          o.issue_limit = w;
          auto mem = run(k, grid, inputs, o).memory;
          ++runs;
          if (!ref) ref = mem;
          else if (mem != *ref) {
            ok = false;
            d << c.name << " " << size.label() << " differs at seed " << seed << "; ";
          }
        }
    }
  }
  d << runs << " runs over " << bench_cases().size() << " benchmarks, 10 seeds x issue_limit {1,32,inf}";
  report(5, "determinism", ok, d.str());
}

void ac6() {
  auto g = saturating_graph(2048);
  GridConfig grid;
  auto m = place_and_route(g, grid);
  std::size_t used = 0;
  for (const auto& p : m.placement) used += p.unit >= 0;
  auto in = random_inputs(g.arrays(), 1);
  auto fast = simulate(g, m, grid, in);
  SimOptions o;
  o.issue_limit = 32;
  auto slow = simulate(g, m, grid, in, o);
  double ratio = static_cast<double>(slow.stats.cycles) / static_cast<double>(fast.stats.cycles);
  std::ostringstream d;
  d << used << "/" << grid.total_units() << " units busy, cycles " << fast.stats.cycles << " unlimited vs "
    << slow.stats.cycles << " at 32, ratio " << std::fixed << std::setprecision(3) << ratio << " (bound 4.375)";
  report(6, "issue-width bound", used == 140 && ratio >= 4.0 && fast.memory == slow.memory, d.str());
}

void ac7() {
  const auto& c = find_case("window");
  auto r = verify(c, c.sizes.front(), 1, GridConfig{});
  std::int64_t balance = 0;
  for (const auto& a : r.stats.audits) balance += std::llabs(a.balance());
  std::ostringstream d;
  d << "win=4, 12 threads: constants " << r.stats.constants << ", drops " << r.stats.drops << ", audit balance "
    << balance;
  report(7, "window constants and drops", r.pass && r.stats.constants == 3 && r.stats.drops == 3 && balance == 0 &&
                                              r.stats.conservation_ok(),
         d.str());
}

void ac8() {
  const auto& c = find_case("eldst_reuse");
  auto r = verify(c, c.sizes.front(), 1, GridConfig{});
  bool all3 = !r.stats.reuse_histogram.empty();
  std::ostringstream d;
  d << "consumers per load:";
  for (const auto& [consumers, loads] : r.stats.reuse_histogram) {
    d << " " << consumers << "x" << loads;
    all3 = all3 && consumers == 3;
  }
  report(8, "eLDST reuse win/delta", r.pass && all3, d.str());
}

void ac9() {
  const auto& c = find_case("stress");
  auto r = verify(c, c.sizes.front(), 1, GridConfig{});
  std::ostringstream d;
  d << "delta=B=16: max occupancy " << r.stats.max_buffer_occupancy << "/" << r.stats.buffer_capacity
    << ", residual tokens " << r.stats.residual_tokens << ", cycles " << r.stats.cycles;
  report(9, "delta = B stress", r.pass && r.stats.max_buffer_occupancy <= r.stats.buffer_capacity &&
                                    r.stats.residual_tokens == 0,
         d.str());
}

void ac10() {
  std::vector<std::string> suite;
  for (const auto& c : bench_cases())
    if (c.suite) suite.push_back(c.name);
  auto rep = sweep(suite, GridConfig{});
  std::ostringstream d;
  d << rep.cdf.size() << " CDF points; fraction with delta <= 16: " << std::fixed << std::setprecision(1)
    << rep.at16 * 100 << "% (paper: 87%)";
  report(10, "delta CDF", !rep.cdf.empty() && rep.cdf.back().second == 1.0, d.str());
}

}  // namespace

int main() {
  guarded(1, "oracle equivalence", ac1);
  guarded(2, "matmul traffic N*K / K*M vs N*M*K", ac2);
  guarded(3, "convolution traffic", ac3);
  guarded(4, "cascade plan", ac4);
  guarded(5, "determinism", ac5);
  guarded(6, "issue-width bound", ac6);
  guarded(7, "window constants and drops", ac7);
  guarded(8, "eLDST reuse win/delta", ac8);
  guarded(9, "delta = B stress", ac9);
  guarded(10, "delta CDF", ac10);
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " failed" : std::string("acceptance: all passed"))
            << std::endl;
  return failures ? 1 : 0;
}
