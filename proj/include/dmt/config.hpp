#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "dmt/memsys.hpp"

namespace dmt {

/// Energy weight per event class; the proxy is the weighted event sum.
struct EnergyModel {
  double alu = 1.0;
  double fpu = 2.0;
  double elevator = 0.5;
  double l1 = 5.0;
  double l2 = 20.0;
  double dram = 100.0;
  double noc_hop = 0.5;
  double lvc = 5.0;
};

/// Physical grid: unit inventory, token buffer depth, latencies, memory and
/// energy parameters. Defaults give the 140-unit reference profile.
struct GridConfig {
  int alus = 32;
  int fpus = 32;
  int special_units = 12;
  int ldst_units = 32;
  int splitjoin_units = 16;
  int control_elevator_units = 16;
  int token_buffer = 16;
  int noc_hop_latency = 1;
  int grid_cols = 14;

  int alu_latency = 1;
  int fpu_latency = 2;
  int special_latency = 8;
  int control_latency = 1;
  int elevator_latency = 1;
  int splitjoin_latency = 1;
  int initiation_interval = 1;
  int elevator_pops = 1;  // ready tokens an elevator may emit per cycle
  int lvc_latency = -1;   // -1: same as the L1 hit latency

  MemConfig mem;
  EnergyModel energy;

  int total_units() const noexcept {
    return alus + fpus + special_units + ldst_units + splitjoin_units + control_elevator_units;
  }
  int effective_lvc_latency() const noexcept { return lvc_latency < 0 ? mem.l1.latency : lvc_latency; }
};

/// Parses `key = value` lines ('#' starts a comment) over the defaults.
/// Unknown keys and malformed or negative values raise ParameterError.
GridConfig parse_grid_config(const std::string& text, GridConfig base = {});
GridConfig load_grid_config(const std::string& path);
/// Writes every key, in a fixed order; parse_grid_config round-trips it.
void write_grid_config(const GridConfig& cfg, std::ostream& os);

}  // namespace dmt
