#include <doctest.h>

#include <sstream>

#include "dmt/error.hpp"
#include "dmt/kernels_embed.hpp"
#include "helpers.hpp"

using namespace dmt;

namespace {
SimStats bench_stats(const std::string& name, std::size_t size = 0) {
  const auto& c = find_case(name);
  return verify(c, c.sizes.at(size), 1, GridConfig{}).stats;
}
}  // namespace

TEST_CASE("energy proxy is linear in the weights") {
  auto s = bench_stats("matmul");
  EnergyModel zero{0, 0, 0, 0, 0, 0, 0, 0};
  CHECK(energy(s, zero) == 0);
  EnergyModel dram = zero;
  dram.dram = 1;
  CHECK(energy(s, dram) == doctest::Approx(static_cast<double>(s.mem.dram_accesses)));
  EnergyModel two = EnergyModel{};
  two.alu *= 2, two.fpu *= 2, two.elevator *= 2, two.l1 *= 2, two.l2 *= 2, two.dram *= 2, two.noc_hop *= 2, two.lvc *= 2;
  CHECK(energy(s, two) == doctest::Approx(2 * energy(s, EnergyModel{})));
}

TEST_CASE("compare ratios") {
  auto a = bench_stats("conv1d");
  auto n = bench_stats("conv1d_naive");
  auto self = compare(a, a, EnergyModel{});
  for (const auto& r : self.ratios)
    if (r.value) CHECK(*r.value == doctest::Approx(1.0));
  auto r = compare(a, n, EnergyModel{});
  CHECK(*r.get("loads.image") == doctest::Approx(766.0 / 256.0));
  auto back = compare(n, a, EnergyModel{});
  CHECK(*r.get("cycles") * *back.get("cycles") == doctest::Approx(1.0));

  auto fm = bench_stats("matmul");
  auto nm = bench_stats("matmul_naive");
  EnergyModel dram_only{0, 0, 0, 0, 0, 1, 0, 0};
  auto mm = compare(fm, nm, dram_only);
  CHECK(*mm.get("energy") == doctest::Approx(*mm.get("dram_accesses")));
  CHECK(*mm.get("loads.A") == doctest::Approx(8.0));

  SimStats empty;
  CHECK_FALSE(compare(empty, a, EnergyModel{}).get("cycles"));
  CHECK(format_ratio(std::nullopt) == "undefined");
}

TEST_CASE("stats records") {
  auto s = bench_stats("prefix_sum");
  std::ostringstream txt, csv;
  write_stats_text(s, EnergyModel{}, txt);
  write_stats_csv(s, EnergyModel{}, csv);
  CHECK(txt.str().find("cycles = ") == 0);
  CHECK(txt.str().find("loads.in = 64") != std::string::npos);
  auto header = csv.str().substr(0, csv.str().find('\n'));
  CHECK(std::count(header.begin(), header.end(), ',') + 1 == static_cast<long>(stats_fields(s, EnergyModel{}).size()));
}

TEST_CASE("grid config parsing") {
  auto g = parse_grid_config("token_buffer = 8\n# comment\nl1.ways = 2\nlatency.fpu = 3\n");
  CHECK(g.token_buffer == 8);
  CHECK(g.mem.l1.ways == 2);
  CHECK(g.fpu_latency == 3);
  CHECK_THROWS_AS(parse_grid_config("bogus = 1"), ParameterError);
  CHECK_THROWS_AS(parse_grid_config("alus = x"), ParameterError);
  std::ostringstream os;
  write_grid_config(g, os);
  auto back = parse_grid_config(os.str());
  CHECK(back.token_buffer == 8);
  CHECK(back.mem.l1.ways == 2);
}

TEST_CASE("delta CDF") {
  auto cdf = delta_cdf({1, 1, 1, 3});
  CHECK(cdf_at(cdf, 3) == 1.0);
  CHECK(cdf_at(cdf, 1) == 0.75);
  CHECK(cdf_at(cdf, 0) == 0.0);
  CHECK_THROWS_WITH(sweep({}, GridConfig{}), "no cases");
}

TEST_CASE("bench cases verify at every size and three seeds") {
  for (const auto& c : bench_cases())
    for (const auto& size : c.sizes)
      for (std::uint64_t seed : {1, 2, 3}) {
        auto r = verify(c, size, seed, GridConfig{});
        CAPTURE(c.name);
        CAPTURE(size.label());
        CHECK_MESSAGE(r.pass, r.message);
      }
  CHECK_THROWS_AS(find_case("nope"), Error);
}

TEST_CASE("diff reports the first mismatch") {
  MemoryImage a{{"x", {Scalar::of_int(1), Scalar::of_int(2)}}};
  MemoryImage b{{"x", {Scalar::of_int(1), Scalar::of_int(3)}}};
  CHECK(diff_memory(a, b) == "x[1]: expected 2, got 3");
  MemoryImage f{{"y", {Scalar::of_float(1.0)}}};
  MemoryImage g{{"y", {Scalar::of_float(1.0 + 1e-12)}}};
  CHECK(diff_memory(f, g).empty());
}
