// dmtsim: compile, simulate, verify and sweep dMT-CGRA kernels.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "dmt/bench.hpp"
#include "dmt/error.hpp"

namespace fs = std::filesystem;
using namespace dmt;

namespace {

struct RunSpec {
  std::string kernel_path;
  std::string case_name;
  std::string grid_path;
  std::string extents;
  std::uint64_t seed = 1;
  std::optional<int> issue_limit;
  std::vector<std::string> defines;  // K=V
  std::vector<std::string> inputs;   // NAME=path
  std::string out = "dmt_out";
  bool trace = false;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::pair<std::string, std::string> split_kv(const std::string& s, char sep) {
  auto p = s.find(sep);
  if (p == std::string::npos) throw Error(Stage::Cli, "expected KEY" + std::string(1, sep) + "VALUE, got '" + s + "'");
  return {trim(s.substr(0, p)), trim(s.substr(p + 1))};
}

std::optional<int> parse_issue_limit(const std::string& v) {
  if (v == "unlimited" || v == "inf" || v.empty()) return std::nullopt;
  int n = 0;
  try {
    n = std::stoi(v);
  } catch (const std::exception&) {
    throw Error(Stage::Cli, "bad issue limit '" + v + "'");
  }
  if (n < 1) throw Error(Stage::Cli, "issue limit must be >= 1");
  return n;
}

void load_manifest(const std::string& path, RunSpec& spec) {
  std::ifstream in(path);
  if (!in) throw Error(Stage::Cli, "manifest not found: " + path);
  const fs::path dir = fs::path(path).parent_path();
  auto rel = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (dir / p).string(); };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    auto [k, v] = split_kv(line, '=');
    if (k == "kernel") spec.kernel_path = rel(v);
    else if (k == "case") spec.case_name = v;
    else if (k == "grid") spec.grid_path = rel(v);
    else if (k == "extents") spec.extents = v;
    else if (k == "seed") spec.seed = std::stoull(v);
    else if (k == "issue_limit") spec.issue_limit = parse_issue_limit(v);
    else if (k == "out") spec.out = rel(v);
    else if (k == "trace") spec.trace = v == "true" || v == "1";
    else if (k == "inputs" && v == "random") continue;
    else if (k.rfind("define.", 0) == 0) spec.defines.push_back(k.substr(7) + "=" + v);
    else if (k.rfind("input.", 0) == 0) spec.inputs.push_back(k.substr(6) + "=" + rel(v));
    else throw Error(Stage::Cli, path + ":" + std::to_string(lineno) + ": unknown manifest key '" + k + "'");
  }
}

GridConfig load_grid(const std::string& path) { return path.empty() ? GridConfig{} : load_grid_config(path); }

struct Source {
  ast::KernelAST ast;
  const BenchCase* bench = nullptr;
  std::string grid_overrides;
};

Source load_source(const RunSpec& spec) {
  Source s;
  if (!spec.case_name.empty()) s.bench = &find_case(spec.case_name);
  if (!spec.kernel_path.empty()) s.ast = parse_file(spec.kernel_path);
  else if (s.bench) s.ast = parse(kernel_source(s.bench->kernel));
  else throw Error(Stage::Cli, "no kernel given (use --kernel, --case or --manifest)");
  return s;
}

ThreadSpace space_of(const RunSpec& spec, const Source& src) {
  if (!spec.extents.empty()) return ThreadSpace::parse(spec.extents);
  if (src.bench) return src.bench->sizes.front().space;
  throw Error(Stage::Cli, "no extents given");
}

Defines defines_of(const RunSpec& spec, const ast::KernelAST& ast, const Source& src) {
  Defines d;
  if (src.bench && spec.extents.empty()) d = src.bench->sizes.front().defines;
  for (const auto& kv : spec.defines) {
    auto [k, v] = split_kv(kv, '=');
    ScalarKind kind = ScalarKind::Int;
    for (const auto& c : ast.consts)
      if (c.name == k && c.value && c.value->kind == ast::ExprKind::FloatLit) kind = ScalarKind::Float;
    d[k] = parse_scalar(v, kind);
  }
  return d;
}

std::vector<Scalar> read_values(const std::string& path, ScalarKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(Stage::Cli, "input file not found: " + path);
  std::vector<Scalar> v;
  std::string tok;
  while (in >> tok) v.push_back(parse_scalar(tok, kind));
  return v;
}

void write_values(const fs::path& path, const std::vector<Scalar>& v) {
  std::ofstream os(path);
  for (const auto& s : v) os << to_string(s) << "\n";
}

int cmd_run(const RunSpec& spec) {
  Source src = load_source(spec);
  GridConfig grid = load_grid(spec.grid_path);
  const ThreadSpace space = space_of(spec, src);
  const Defines defines = defines_of(spec, src.ast, src);
  if (src.bench && spec.extents.empty()) grid = parse_grid_config(src.bench->sizes.front().grid_overrides, grid);
  auto k = compile(src.ast, space, grid, defines);
  MemoryImage inputs = random_inputs(k.graph.arrays(), spec.seed);
  for (const auto& kv : spec.inputs) {
    auto [name, path] = split_kv(kv, '=');
    const auto* decl = k.graph.find_array(name);
    if (!decl) throw Error(Stage::Cli, "input for undeclared array '" + name + "'");
    inputs[name] = read_values(path, decl->type);
  }
  fs::create_directories(spec.out);
  std::ofstream trace;
  SimOptions opt;
  opt.seed = spec.seed;
  opt.issue_limit = spec.issue_limit;
  if (spec.trace) {
    trace.open(fs::path(spec.out) / "trace.txt");
    opt.trace = &trace;
  }
  auto res = run(k, grid, inputs, opt);
  for (const auto& [name, values] : res.memory) write_values(fs::path(spec.out) / (name + ".txt"), values);
  {
    std::ofstream os(fs::path(spec.out) / "stats.txt");
    write_stats_text(res.stats, grid.energy, os);
  }
  {
    std::ofstream os(fs::path(spec.out) / "stats.csv");
    write_stats_csv(res.stats, grid.energy, os);
  }
  std::cout << "cycles " << res.stats.cycles << ", firings " << res.stats.total_firings << ", outputs in " << spec.out
            << "\n";
  if (src.bench) {
    auto consts = resolve_consts(src.ast, space, defines);
    std::string d = diff_memory(src.bench->oracle(inputs, space, consts), res.memory);
    if (!d.empty()) {
      std::cout << "verify: FAIL " << d << "\n";
      return 1;
    }
    std::cout << "verify: PASS\n";
  }
  return 0;
}

int cmd_verify(std::vector<std::string> cases, const std::vector<std::uint64_t>& seeds, const std::string& grid_path,
               std::optional<int> issue_limit) {
  const GridConfig grid = load_grid(grid_path);
  if (cases.empty())
    for (const auto& c : bench_cases()) cases.push_back(c.name);
  bool ok = true;
  for (const auto& name : cases) {
    const auto& bench = find_case(name);
    for (const auto& size : bench.sizes)
      for (auto seed : seeds) {
        SimOptions opt;
        opt.issue_limit = issue_limit;
        auto r = verify(bench, size, seed, grid, opt);
        ok = ok && r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << name << " " << size.label() << " seed=" << seed << " "
                  << r.message << "\n";
      }
  }
  return ok ? 0 : 1;
}

int cmd_sweep(std::vector<std::string> cases, const std::string& grid_path, std::uint64_t seed, const std::string& out) {
  const GridConfig grid = load_grid(grid_path);
  if (cases.empty())
    for (const auto& c : bench_cases())
      if (c.suite) cases.push_back(c.name);
  auto rep = sweep(cases, grid, seed);
  fs::create_directories(out);
  {
    std::ofstream os(fs::path(out) / "sweep.csv");
    write_sweep_csv(rep, grid.energy, os);
  }
  {
    std::ofstream os(fs::path(out) / "delta_cdf.csv");
    write_cdf_csv(rep, os);
  }
  write_sweep_csv(rep, grid.energy, std::cout);
  std::cout << "\n";
  write_cdf_csv(rep, std::cout);
  std::cout << std::fixed << std::setprecision(1) << "\nfraction of deltas <= 16: " << rep.at16 * 100
            << "% (paper observation: 87%)\n";
  return 0;
}

void add_kernel_opts(CLI::App* app, RunSpec& spec) {
  app->add_option("--kernel", spec.kernel_path, "kernel source file (.dmt)");
  app->add_option("--case", spec.case_name, "bundled benchmark case");
  app->add_option("--grid", spec.grid_path, "grid config file");
  app->add_option("--extents", spec.extents, "thread block shape, e.g. 64 or 8x8");
  app->add_option("--define", spec.defines, "override a kernel const, NAME=VALUE");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dMT-CGRA compiler and simulator"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string manifest;
  std::string issue;
  auto* run_cmd = app.add_subcommand("run", "compile and simulate a kernel");
  run_cmd->add_option("--manifest", manifest, "run manifest (key = value lines)");
  add_kernel_opts(run_cmd, spec);
  run_cmd->add_option("--seed", spec.seed, "input and arbitration seed");
  run_cmd->add_option("--issue-limit", issue, "max unit firings per cycle, or 'unlimited'");
  run_cmd->add_option("--input", spec.inputs, "array contents from a file, NAME=PATH");
  run_cmd->add_option("--out", spec.out, "output directory");
  run_cmd->add_flag("--trace", spec.trace, "write trace.txt");

  std::vector<std::string> cases;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::string grid_path, out = "dmt_sweep";
  std::uint64_t seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "check bundled cases against their oracles");
  verify_cmd->add_option("--case", cases, "case name (default: all)");
  verify_cmd->add_option("--seed", seeds, "seeds");
  verify_cmd->add_option("--grid", grid_path, "grid config file");
  verify_cmd->add_option("--issue-limit", issue, "max unit firings per cycle");

  auto* sweep_cmd = app.add_subcommand("sweep", "run the suite and report speedups and the delta CDF");
  sweep_cmd->add_option("--case", cases, "case name (default: suite)");
  sweep_cmd->add_option("--grid", grid_path, "grid config file");
  sweep_cmd->add_option("--seed", seed, "seed");
  sweep_cmd->add_option("--out", out, "output directory");

  bool expanded = false, dot = false;
  auto* dg_cmd = app.add_subcommand("dump-graph", "print the dataflow graph");
  add_kernel_opts(dg_cmd, spec);
  dg_cmd->add_flag("--expanded", expanded, "after cascade expansion and spilling");
  dg_cmd->add_flag("--dot", dot, "Graphviz output");

  auto* dm_cmd = app.add_subcommand("dump-mapping", "print placement and routes");
  add_kernel_opts(dm_cmd, spec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      if (!manifest.empty()) {
        RunSpec cli = spec;
        spec = RunSpec{};
        load_manifest(manifest, spec);
        if (run_cmd->count("--out")) spec.out = cli.out;
        if (run_cmd->count("--seed")) spec.seed = cli.seed;
        if (cli.trace) spec.trace = true;
      }
      if (!issue.empty()) spec.issue_limit = parse_issue_limit(issue);
      return cmd_run(spec);
    }
    if (*verify_cmd) return cmd_verify(cases, seeds, grid_path, issue.empty() ? std::nullopt : parse_issue_limit(issue));
    if (*sweep_cmd) return cmd_sweep(cases, grid_path, seed, out);
    Source src = load_source(spec);
    GridConfig grid = load_grid(spec.grid_path);
    const ThreadSpace space = space_of(spec, src);
    const Defines defines = defines_of(spec, src.ast, src);
    if (src.bench && spec.extents.empty()) grid = parse_grid_config(src.bench->sizes.front().grid_overrides, grid);
    if (*dg_cmd) {
      DataflowGraph g = expanded ? compile(src.ast, space, grid, defines).graph : lower(src.ast, space, defines);
      if (dot) to_dot(g, std::cout);
      else dump(g, std::cout);
      return 0;
    }
    auto k = compile(src.ast, space, grid, defines);
    dump(k.mapping, k.graph, std::cout);
    return 0;
  } catch (const Error& e) {
    std::cerr << stage_name(e.stage()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cli: " << e.what() << "\n";
    return 2;
  }
}
