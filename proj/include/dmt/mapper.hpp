#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dmt/config.hpp"
#include "dmt/graph.hpp"

namespace dmt {

/// Split of a communication distance into elevator stages of at most B.
struct CascadePlan {
  std::vector<std::int64_t> segments;  // positive, max-first
  std::int64_t total = 0;
};

/// Greedy max-first segmentation of |linear_delta|. Throws ParameterError for
/// linear_delta == 0 or B < 1.
CascadePlan cascade_plan(std::int64_t linear_delta, std::int64_t capacity);

/// Consecutive [lo, hi) thread groups of size `window`; the last may be shorter.
/// Throws ParameterError (mapper stage) unless 1 <= window <= block_size.
std::vector<std::pair<std::int64_t, std::int64_t>> partition_windows(std::int64_t block_size, std::int64_t window);

struct ExpandResult {
  DataflowGraph graph;
  /// Elevator nodes that did not fit the control/elevator inventory; each
  /// stands for a whole communication and must be spilled.
  std::vector<NodeId> overflow;
  std::size_t cascades = 0;  // elevators expanded into more than one stage
  std::size_t loops = 0;     // ELoadStores turned into forwarding loops
};

/// Expands elevators with |delta| > B into cascades and ELoadStores with
/// |delta| > B into Mux/elevator/Steer forwarding loops. Communications are
/// allocated elevator units in node order; those that do not fit are left as
/// one node and reported in `overflow`.
ExpandResult expand_comm(const DataflowGraph& graph, const GridConfig& grid);

/// Routes each overflowing communication through the Live Value Cache.
/// Returns the number of spill channels created.
std::size_t spill(DataflowGraph& graph, const std::vector<NodeId>& overflow);

enum class UnitClass : std::uint8_t { Alu, Fpu, Special, Ldst, SplitJoin, ControlElevator, Lvc, Injector };

std::string_view unit_class_name(UnitClass cls) noexcept;
/// Class of unit a node occupies. ConstSource/TidSource map to Injector,
/// spilled elevators to Lvc; neither consumes grid units.
UnitClass unit_class_of(const NodeKind& kind) noexcept;

struct Unit {
  int id = 0;
  UnitClass cls = UnitClass::Alu;
  int row = 0;
  int col = 0;
};

struct Placement {
  int unit = -1;  // physical unit id, -1 for injector / LVC
  UnitClass cls = UnitClass::Alu;
  int row = 0;
  int col = 0;
};

struct Route {
  std::vector<std::pair<int, int>> hops;  // grid cells visited after the source
  int latency = 1;
};

struct Mapping {
  std::vector<Unit> units;            // physical grid
  int rows = 0;
  int cols = 0;
  std::vector<Placement> placement;   // per node
  std::vector<Route> routes;          // per graph edge, same order
  std::vector<NodeId> spilled;

  std::size_t used_units(UnitClass cls) const;
  std::size_t total_hops() const;
};

/// Physical layout of the grid: classes interleaved row-major over grid_cols.
std::vector<Unit> grid_layout(const GridConfig& grid);

/// Deterministic placement (topological order, nearest free unit of the
/// node's class to the centroid of placed predecessors) and XY routing.
/// Throws CapacityError naming the class when a class is oversubscribed.
Mapping place_and_route(const DataflowGraph& graph, const GridConfig& grid);

void dump(const Mapping& mapping, const DataflowGraph& graph, std::ostream& os);

}  // namespace dmt
