#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmt/config.hpp"
#include "dmt/graph.hpp"
#include "dmt/mapper.hpp"
#include "dmt/memory_image.hpp"
#include "dmt/memsys.hpp"

namespace dmt {

struct SimOptions {
  std::uint64_t seed = 1;
  std::optional<int> issue_limit;  // max unit firings per cycle; nullopt = unlimited
  std::int64_t max_cycles = 0;     // 0: 10 x threads x nodes
  std::ostream* trace = nullptr;
};

/// Token-conservation audit of one communication (all stages of a cascade).
struct CommAudit {
  std::int32_t comm_id = -1;
  std::uint64_t received = 0;   // tokens entering the first stage
  std::uint64_t emitted = 0;    // tokens leaving the last stage
  std::uint64_t constants = 0;  // constant injections at the last stage
  std::uint64_t drops = 0;      // boundary drops at any stage
  std::int64_t balance() const noexcept {
    return static_cast<std::int64_t>(received) -
           (static_cast<std::int64_t>(emitted) - static_cast<std::int64_t>(constants) + static_cast<std::int64_t>(drops));
  }
};

struct SimStats {
  std::int64_t cycles = 0;
  std::int64_t threads = 0;
  std::map<std::string, std::uint64_t> firings_by_class;
  std::vector<std::uint64_t> node_firings;  // per graph node
  std::uint64_t total_firings = 0;
  std::uint64_t retagged = 0;
  std::uint64_t constants = 0;
  std::uint64_t drops = 0;
  std::uint64_t spills = 0;        // spilled communication channels
  std::uint64_t lvc_accesses = 0;
  std::uint64_t noc_hops = 0;      // token hops traversed
  std::uint64_t tokens_delivered = 0;
  std::uint64_t eldst_loads = 0;
  std::uint64_t eldst_forwards = 0;
  std::uint64_t eldst_discards = 0;
  std::map<std::uint64_t, std::uint64_t> reuse_histogram;  // consumers per load -> loads
  std::int64_t max_buffer_occupancy = 0;
  std::int64_t buffer_capacity = 0;
  std::uint64_t residual_tokens = 0;
  bool tag_preserved = true;
  bool retag_law = true;
  std::vector<CommAudit> audits;
  MemStats mem;

  /// Firings per cycle of a node's unit, in [0, 1].
  double utilization(NodeId node) const;
  bool conservation_ok() const;
};

struct SimResult {
  MemoryImage memory;
  SimStats stats;
};

/// Allocates zeroed arrays for every declaration missing from `image` and
/// checks the sizes of the ones present.
MemoryImage prepare_memory(const DataflowGraph& graph, const MemoryImage& image);

/// Cycle-stepped tagged-token execution of a mapped graph. Throws SimFault on
/// out-of-range accesses and DeadlockError when threads cannot complete.
SimResult simulate(const DataflowGraph& graph, const Mapping& mapping, const GridConfig& grid,
                   const MemoryImage& inputs, const SimOptions& options = {});

}  // namespace dmt
