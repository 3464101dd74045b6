#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dmt/config.hpp"
#include "dmt/sim.hpp"

namespace dmt {

/// Event counts the energy proxy weighs.
struct EnergyEvents {
  double alu = 0;
  double fpu = 0;
  double elevator = 0;
  double l1 = 0;
  double l2 = 0;
  double dram = 0;
  double noc_hop = 0;
  double lvc = 0;
};

EnergyEvents energy_events(const SimStats& stats);
/// Sum of event count x weight.
double energy(const SimStats& stats, const EnergyModel& model);

struct Ratio {
  std::string metric;
  std::optional<double> value;  // nullopt when the A-side counter is zero
};

struct CompareReport {
  std::vector<Ratio> ratios;
  /// Ratio for `metric`; nullopt if undefined or absent.
  std::optional<double> get(const std::string& metric) const;
  bool has(const std::string& metric) const;
};

/// B/A ratio of cycles, traffic counters, per-array loads and energy.
CompareReport compare(const SimStats& a, const SimStats& b, const EnergyModel& model);
std::string format_ratio(const std::optional<double>& r);

/// `key = value` record, one key per line, fixed order.
void write_stats_text(const SimStats& stats, const EnergyModel& model, std::ostream& os);
/// Header line plus one row with the same keys as write_stats_text.
void write_stats_csv(const SimStats& stats, const EnergyModel& model, std::ostream& os);
std::vector<std::pair<std::string, std::string>> stats_fields(const SimStats& stats, const EnergyModel& model);

}  // namespace dmt
