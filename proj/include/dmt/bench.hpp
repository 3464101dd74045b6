#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmt/pipeline.hpp"
#include "dmt/stats.hpp"

namespace dmt {

/// One problem size of a benchmark: thread space, const overrides and grid
/// keys (`key = value` lines) applied on top of the caller's grid.
struct BenchSize {
  ThreadSpace space;
  Defines defines;
  std::string grid_overrides;
  std::string label() const;
};

using Consts = std::map<std::string, Scalar>;

struct BenchCase {
  std::string name;
  std::string kernel;  // bundled kernel name
  std::vector<BenchSize> sizes;
  bool suite = false;  // part of the benchmark suite used by sweep
  /// Expected final contents of the output arrays.
  std::function<MemoryImage(const MemoryImage& inputs, const ThreadSpace&, const Consts&)> oracle;
  /// Exact per-array load counts.
  std::function<std::map<std::string, std::uint64_t>(const ThreadSpace&, const Consts&)> expected_loads;
};

/// Source of a bundled kernel; throws Error(Cli) for unknown names.
const std::string& kernel_source(const std::string& name);
std::vector<std::string> kernel_names();

const std::vector<BenchCase>& bench_cases();
/// Throws Error(Cli) for unknown names.
const BenchCase& find_case(const std::string& name);

/// Seeded inputs for every array: ints in [-50, 50], floats in [-1, 1).
MemoryImage random_inputs(const std::vector<ArrayDecl>& arrays, std::uint64_t seed);

struct VerifyResult {
  bool pass = false;
  std::string message;  // first mismatch, or a summary line
  SimStats stats;
};

/// Compares `actual` against `expected` arrays: exact for ints, relative
/// 1e-9 for floats. Empty string on match, else the first difference.
std::string diff_memory(const MemoryImage& expected, const MemoryImage& actual);

VerifyResult verify(const BenchCase& bench, const BenchSize& size, std::uint64_t seed, const GridConfig& grid,
                    const SimOptions& options = {});

/// Linear |delta| of every communication node in a lowered graph.
std::vector<std::int64_t> comm_deltas(const DataflowGraph& graph);
/// Sorted (delta, cumulative fraction) pairs.
std::vector<std::pair<std::int64_t, double>> delta_cdf(std::vector<std::int64_t> deltas);
/// Fraction of deltas <= d.
double cdf_at(const std::vector<std::pair<std::int64_t, double>>& cdf, std::int64_t d);

struct SweepRow {
  std::string name;
  std::string size;
  SimStats unlimited;
  SimStats limited;  // issue_limit = 32
  double energy = 0;
  std::optional<double> speedup;  // limited cycles / unlimited cycles
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::vector<std::pair<std::int64_t, double>> cdf;
  double at16 = 0;
};

/// Runs every case (first size) unlimited and at issue_limit 32, and builds the
/// delta CDF over the cases' communications. Throws Error(Cli) "no cases" on
/// an empty list and when any case fails verification.
SweepReport sweep(const std::vector<std::string>& cases, const GridConfig& grid, std::uint64_t seed = 1);
void write_sweep_csv(const SweepReport& report, const EnergyModel& model, std::ostream& os);
void write_cdf_csv(const SweepReport& report, std::ostream& os);

/// Synthetic fully parallel graph using exactly one node per unit of the
/// default 140-unit grid.
DataflowGraph saturating_graph(std::int64_t threads);

}  // namespace dmt
