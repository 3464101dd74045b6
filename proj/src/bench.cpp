#include "dmt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <random>
#include <sstream>

#include "dmt/error.hpp"
#include "dmt/kernels_embed.hpp"

namespace dmt {

std::string BenchSize::label() const {
  std::string s = space.to_string();
  for (const auto& [k, v] : defines) s += " " + k + "=" + to_string(v);
  return s;
}

const std::string& kernel_source(const std::string& name) {
  const auto& k = embedded::kernels();
  auto it = k.find(name);
  if (it == k.end()) throw Error(Stage::Cli, "unknown kernel '" + name + "'");
  return it->second;
}

std::vector<std::string> kernel_names() {
  std::vector<std::string> out;
  for (const auto& [name, src] : embedded::kernels()) out.push_back(name);
  return out;
}

namespace {

std::int64_t ci(const Consts& c, const char* name) { return c.at(name).as_int(); }

std::vector<Scalar> ints(const std::vector<std::int64_t>& v) {
  std::vector<Scalar> out;
  for (auto x : v) out.push_back(Scalar::of_int(x));
  return out;
}

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

MemoryImage prefix_oracle(const MemoryImage& in, const ThreadSpace& s, const Consts&) {
  std::vector<std::int64_t> out;
  std::int64_t sum = 0;
  for (Tid t = 0; t < s.block_size(); ++t) out.push_back(sum = wrap_add(sum, in.at("in")[static_cast<std::size_t>(t)].i));
  return {{"out", ints(out)}};
}

MemoryImage conv_oracle(const MemoryImage& in, const ThreadSpace& s, const Consts& c) {
  const auto& img = in.at("image");
  const auto n = s.block_size();
  auto at = [&](std::int64_t i) { return i < 0 || i >= n ? 0 : img[static_cast<std::size_t>(i)].i; };
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < n; ++i)
    out.push_back(wrap_add(wrap_add(wrap_mul(at(i - 1), ci(c, "W0")), wrap_mul(at(i), ci(c, "W1"))),
                           wrap_mul(at(i + 1), ci(c, "W2"))));
  return {{"result", ints(out)}};
}

MemoryImage matmul_oracle(const MemoryImage& in, const ThreadSpace& s, const Consts& c) {
  const auto rows = s.extent(1), cols = s.extent(0), k = ci(c, "K");
  const auto& a = in.at("A");
  const auto& b = in.at("B");
  std::vector<Scalar> out;
  for (std::int64_t r = 0; r < rows; ++r)
    for (std::int64_t col = 0; col < cols; ++col) {
      double sum = 0.0;
      for (std::int64_t i = 0; i < k; ++i)
        sum += a[static_cast<std::size_t>(r * k + i)].f * b[static_cast<std::size_t>(i * cols + col)].f;
      out.push_back(Scalar::of_float(sum));
    }
  return {{"C", out}};
}

MemoryImage reduce_oracle(const MemoryImage& in, const ThreadSpace& s, const Consts&) {
  const auto n = s.block_size();
  std::vector<std::int64_t> out(static_cast<std::size_t>((n + 127) / 128), 0);
  for (std::int64_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i / 128)] = wrap_add(out[static_cast<std::size_t>(i / 128)], in.at("in")[static_cast<std::size_t>(i)].i);
  return {{"total", ints(out)}};
}

MemoryImage window_oracle(const MemoryImage& in, const ThreadSpace& s, const Consts& c) {
  const auto w = ci(c, "WIN");
  std::vector<std::int64_t> out;
  for (std::int64_t t = 0; t < s.block_size(); ++t)
    out.push_back(t % w == 0 ? ci(c, "C") : in.at("in")[static_cast<std::size_t>(t - 1)].i);
  return {{"out", ints(out)}};
}

MemoryImage reuse_oracle(const MemoryImage& in, const ThreadSpace& s, const Consts& c) {
  const auto w = ci(c, "WIN");
  std::vector<std::int64_t> out;
  for (std::int64_t t = 0; t < s.block_size(); ++t)
    out.push_back(in.at("X")[static_cast<std::size_t>((t / w) * 2 + (t % w) % 2)].i);
  return {{"out", ints(out)}};
}

MemoryImage stress_oracle(const MemoryImage& in, const ThreadSpace& s, const Consts& c) {
  const auto d = ci(c, "D");
  auto v = [&](std::int64_t t) { return wrap_add(wrap_mul(in.at("in")[static_cast<std::size_t>(t)].i, 3), 1); };
  std::vector<std::int64_t> out;
  for (std::int64_t t = 0; t < s.block_size(); ++t) out.push_back(wrap_add(v(t), t >= d ? v(t - d) : 7));
  return {{"out", ints(out)}};
}

using Loads = std::map<std::string, std::uint64_t>;
auto u64 = [](std::int64_t v) { return static_cast<std::uint64_t>(v); };

std::vector<BenchCase> make_cases() {
  std::vector<BenchCase> c;
  auto one_per_thread = [](const char* array) {
    return [array](const ThreadSpace& s, const Consts&) { return Loads{{array, u64(s.block_size())}}; };
  };
  c.push_back({"prefix_sum", "prefix_sum", {{ThreadSpace{64}, {}, ""}, {ThreadSpace{256}, {}, ""}}, true,
               prefix_oracle, one_per_thread("in")});
  c.push_back({"conv1d", "conv1d", {{ThreadSpace{256}, {}, ""}}, true, conv_oracle, one_per_thread("image")});
  c.push_back({"conv1d_naive", "conv1d_naive", {{ThreadSpace{256}, {}, ""}}, true, conv_oracle,
               [](const ThreadSpace& s, const Consts&) { return Loads{{"image", u64(3 * s.block_size() - 2)}}; }});
  const std::vector<BenchSize> mm = {{ThreadSpace{8, 8}, {{"K", Scalar::of_int(8)}}, ""},
                                     {ThreadSpace{16, 16}, {{"K", Scalar::of_int(16)}}, "ldst_units = 33\n"}};
  c.push_back({"matmul", "matmul", mm, true, matmul_oracle, [](const ThreadSpace& s, const Consts& k) {
                 return Loads{{"A", u64(s.extent(1) * ci(k, "K"))}, {"B", u64(ci(k, "K") * s.extent(0))}};
               }});
  c.push_back({"matmul_naive", "matmul_naive", mm, true, matmul_oracle, [](const ThreadSpace& s, const Consts& k) {
                 auto n = u64(s.block_size() * ci(k, "K"));
                 return Loads{{"A", n}, {"B", n}};
               }});
  c.push_back({"reduce", "reduce", {{ThreadSpace{128}, {}, ""}}, true, reduce_oracle, one_per_thread("in")});
  c.push_back({"window", "window", {{ThreadSpace{12}, {}, ""}}, false, window_oracle, one_per_thread("in")});
  c.push_back({"eldst_reuse", "eldst_reuse", {{ThreadSpace{12}, {}, ""}}, false, reuse_oracle,
               [](const ThreadSpace& s, const Consts& k) { return Loads{{"X", u64(s.block_size() / ci(k, "WIN") * 2)}}; }});
  c.push_back({"stress", "stress", {{ThreadSpace{256}, {}, ""}}, false, stress_oracle, one_per_thread("in")});
  return c;
}

}  // namespace

const std::vector<BenchCase>& bench_cases() {
  static const std::vector<BenchCase> cases = make_cases();
  return cases;
}

const BenchCase& find_case(const std::string& name) {
  for (const auto& c : bench_cases())
    if (c.name == name) return c;
  throw Error(Stage::Cli, "unknown benchmark '" + name + "'");
}

MemoryImage random_inputs(const std::vector<ArrayDecl>& arrays, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> idist(-50, 50);
  std::uniform_real_distribution<double> fdist(-1.0, 1.0);
  MemoryImage mem;
  for (const auto& a : arrays) {
    auto& v = mem[a.name];
    for (std::int64_t i = 0; i < a.extent; ++i)
      v.push_back(a.type == ScalarKind::Int ? Scalar::of_int(idist(rng)) : Scalar::of_float(fdist(rng)));
  }
  return mem;
}

std::string diff_memory(const MemoryImage& expected, const MemoryImage& actual) {
  for (const auto& [name, want] : expected) {
    auto it = actual.find(name);
    if (it == actual.end()) return "array " + name + " missing";
    const auto& got = it->second;
    if (got.size() != want.size())
      return "array " + name + " has " + std::to_string(got.size()) + " elements, expected " + std::to_string(want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      bool same;
      if (want[i].is_float() || got[i].is_float()) {
        double w = want[i].as_float(), g = got[i].as_float();
        same = w == g || std::abs(w - g) <= 1e-9 * std::max(std::abs(w), std::abs(g));
      } else {
        same = want[i] == got[i];
      }
      if (!same)
        return name + "[" + std::to_string(i) + "]: expected " + to_string(want[i]) + ", got " + to_string(got[i]);
    }
  }
  return {};
}

VerifyResult verify(const BenchCase& bench, const BenchSize& size, std::uint64_t seed, const GridConfig& grid,
                    const SimOptions& options) {
  VerifyResult res;
  const GridConfig g = parse_grid_config(size.grid_overrides, grid);
  auto ast = parse(kernel_source(bench.kernel));
  auto consts = resolve_consts(ast, size.space, size.defines);
  auto k = compile(ast, size.space, g, size.defines);
  auto inputs = random_inputs(k.graph.arrays(), seed);
  SimOptions opt = options;
  opt.seed = seed;
  auto sim = run(k, g, inputs, opt);
  res.stats = sim.stats;
  auto expected = bench.oracle(inputs, size.space, consts);
  std::string d = diff_memory(expected, sim.memory);
  std::ostringstream msg;
  if (d.empty()) {
    for (const auto& [array, want] : bench.expected_loads(size.space, consts)) {
      auto got = per_array_load_count(sim.stats.mem, array);
      if (got != want) {
        d = "loads of " + array + ": expected " + std::to_string(want) + ", got " + std::to_string(got);
        break;
      }
    }
  }
  if (d.empty() && !sim.stats.conservation_ok()) d = "token conservation audit failed";
  if (d.empty() && sim.stats.max_buffer_occupancy > g.token_buffer) d = "token buffer over capacity";
  res.pass = d.empty();
  if (res.pass) {
    msg << "cycles=" << sim.stats.cycles;
    for (const auto& [array, n] : sim.stats.mem.array_loads)
      if (n) msg << " loads." << array << "=" << n;
  } else {
    msg << d;
  }
  res.message = msg.str();
  return res;
}

std::vector<std::int64_t> comm_deltas(const DataflowGraph& graph) {
  std::vector<std::int64_t> out;
  for (const auto& n : graph.nodes()) {
    if (const auto* e = std::get_if<Elevator>(&n.kind); e && e->role == ElevatorRole::Whole)
      out.push_back(std::llabs(delta_to_linear(e->delta, graph.thread_space())));
    if (const auto* l = std::get_if<ELoadStore>(&n.kind))
      out.push_back(std::llabs(delta_to_linear(l->delta, graph.thread_space())));
  }
  return out;
}

std::vector<std::pair<std::int64_t, double>> delta_cdf(std::vector<std::int64_t> deltas) {
  std::vector<std::pair<std::int64_t, double>> cdf;
  std::sort(deltas.begin(), deltas.end());
  const double n = static_cast<double>(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i)
    if (i + 1 == deltas.size() || deltas[i + 1] != deltas[i])
      cdf.emplace_back(deltas[i], static_cast<double>(i + 1) / n);
  return cdf;
}

double cdf_at(const std::vector<std::pair<std::int64_t, double>>& cdf, std::int64_t d) {
  double f = 0;
  for (const auto& [delta, frac] : cdf)
    if (delta <= d) f = frac;
  return f;
}

SweepReport sweep(const std::vector<std::string>& cases, const GridConfig& grid, std::uint64_t seed) {
  if (cases.empty()) throw Error(Stage::Cli, "no cases");
  SweepReport rep;
  std::vector<std::int64_t> deltas;
  for (const auto& name : cases) {
    const auto& bench = find_case(name);
    const auto& size = bench.sizes.front();
    auto unl = verify(bench, size, seed, grid);
    if (!unl.pass) throw Error(Stage::Cli, "sweep: case " + name + " failed verification: " + unl.message);
    SimOptions lim;
    lim.issue_limit = 32;
    auto w32 = verify(bench, size, seed, grid, lim);
    if (!w32.pass) throw Error(Stage::Cli, "sweep: case " + name + " failed verification: " + w32.message);
    SweepRow row{name, size.label(), unl.stats, w32.stats, energy(unl.stats, grid.energy), std::nullopt};
    row.speedup = compare(unl.stats, w32.stats, grid.energy).get("cycles");
    rep.rows.push_back(row);
    auto lowered = lower(parse(kernel_source(bench.kernel)), size.space, size.defines);
    auto d = comm_deltas(lowered);
    deltas.insert(deltas.end(), d.begin(), d.end());
  }
  rep.cdf = delta_cdf(deltas);
  rep.at16 = cdf_at(rep.cdf, 16);
  return rep;
}

void write_sweep_csv(const SweepReport& report, const EnergyModel& model, std::ostream& os) {
  os << "case,size,cycles,cycles_w32,speedup_vs_w32,firings,loads,stores,l1_accesses,l2_accesses,dram_accesses,"
        "retagged,spills,energy\n";
  for (const auto& r : report.rows) {
    const auto& s = r.unlimited;
    os << r.name << "," << r.size << "," << s.cycles << "," << r.limited.cycles << "," << format_ratio(r.speedup) << ","
       << s.total_firings << "," << s.mem.loads << "," << s.mem.stores << "," << s.mem.l1_accesses() << ","
       << s.mem.l2_accesses() << "," << s.mem.dram_accesses << "," << s.retagged << "," << s.spills << ","
       << energy(s, model) << "\n";
  }
}

void write_cdf_csv(const SweepReport& report, std::ostream& os) {
  os << "delta,cumulative_fraction\n";
  for (const auto& [d, f] : report.cdf) os << d << "," << f << "\n";
}

DataflowGraph saturating_graph(std::int64_t threads) {
  DataflowGraph g(ThreadSpace{threads});
  g.add_array({"a", ScalarKind::Int, threads});
  for (int k = 0; k < 16; ++k)
    g.add_array({"out" + std::to_string(k), k < 12 ? ScalarKind::Float : ScalarKind::Int, threads});
  NodeId tid = g.add_node(TidSource{}, "tid");
  NodeId three = g.add_node(ConstSource{Scalar::of_int(3)});
  for (int k = 0; k < 16; ++k) {
    NodeId ld = g.add_node(LoadStore{"a", false, 0, false, false});
    g.connect(tid, 0, ld, 0);
    NodeId add = g.add_node(ArithOp{Opcode::Add});
    g.connect(ld, 0, add, 0);
    g.connect(tid, 0, add, 1);
    NodeId mul = g.add_node(ArithOp{Opcode::Mul});
    g.connect(add, 0, mul, 0);
    g.connect(three, 0, mul, 1);
    NodeId fl = g.add_node(FloatOp{Opcode::ToFloat});
    g.connect(mul, 0, fl, 0);
    NodeId sq = g.add_node(FloatOp{Opcode::Mul});
    g.connect(fl, 0, sq, 0);
    g.connect(fl, 0, sq, 1);
    NodeId cmp = g.add_node(Control{Opcode::Lt});
    g.connect(add, 0, cmp, 0);
    g.connect(mul, 0, cmp, 1);
    NodeId sj = g.add_node(SplitJoin{1});
    g.connect(ld, 1, sj, 0);
    NodeId value = cmp;
    if (k < 12) {
      value = g.add_node(FloatOp{Opcode::Sqrt});
      g.connect(sq, 0, value, 0);
    }
    NodeId st = g.add_node(Sink{"out" + std::to_string(k), 0, false, true});
    g.connect(tid, 0, st, 0);
    g.connect(value, 0, st, 1);
    g.connect(sj, 0, st, 2);
  }
  return g;
}

}  // namespace dmt
