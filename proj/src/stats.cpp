#include "dmt/stats.hpp"

#include <cstdio>
#include <ostream>
#include <set>

namespace dmt {

namespace {

double count(const std::map<std::string, std::uint64_t>& m, const char* key) {
  auto it = m.find(key);
  return it == m.end() ? 0.0 : static_cast<double>(it->second);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

EnergyEvents energy_events(const SimStats& s) {
  EnergyEvents e;
  e.alu = count(s.firings_by_class, "alu");
  e.fpu = count(s.firings_by_class, "fpu") + count(s.firings_by_class, "special");
  e.elevator = static_cast<double>(s.retagged);
  e.l1 = static_cast<double>(s.mem.l1_accesses());
  e.l2 = static_cast<double>(s.mem.l2_accesses());
  e.dram = static_cast<double>(s.mem.dram_accesses);
  e.noc_hop = static_cast<double>(s.noc_hops);
  e.lvc = static_cast<double>(s.lvc_accesses);
  return e;
}

double energy(const SimStats& stats, const EnergyModel& m) {
  auto e = energy_events(stats);
  return e.alu * m.alu + e.fpu * m.fpu + e.elevator * m.elevator + e.l1 * m.l1 + e.l2 * m.l2 + e.dram * m.dram +
         e.noc_hop * m.noc_hop + e.lvc * m.lvc;
}

std::optional<double> CompareReport::get(const std::string& metric) const {
  for (const auto& r : ratios)
    if (r.metric == metric) return r.value;
  return std::nullopt;
}

bool CompareReport::has(const std::string& metric) const {
  for (const auto& r : ratios)
    if (r.metric == metric) return true;
  return false;
}

CompareReport compare(const SimStats& a, const SimStats& b, const EnergyModel& model) {
  CompareReport rep;
  auto add = [&](const std::string& name, double va, double vb) {
    rep.ratios.push_back({name, va == 0.0 ? std::nullopt : std::optional<double>(vb / va)});
  };
  add("cycles", static_cast<double>(a.cycles), static_cast<double>(b.cycles));
  add("firings", static_cast<double>(a.total_firings), static_cast<double>(b.total_firings));
  add("loads", static_cast<double>(a.mem.loads), static_cast<double>(b.mem.loads));
  add("stores", static_cast<double>(a.mem.stores), static_cast<double>(b.mem.stores));
  add("l1_accesses", static_cast<double>(a.mem.l1_accesses()), static_cast<double>(b.mem.l1_accesses()));
  add("l2_accesses", static_cast<double>(a.mem.l2_accesses()), static_cast<double>(b.mem.l2_accesses()));
  add("dram_accesses", static_cast<double>(a.mem.dram_accesses), static_cast<double>(b.mem.dram_accesses));
  add("noc_hops", static_cast<double>(a.noc_hops), static_cast<double>(b.noc_hops));
  std::set<std::string> arrays;
  for (const auto& [n, c] : a.mem.array_loads) arrays.insert(n);
  for (const auto& [n, c] : b.mem.array_loads) arrays.insert(n);
  for (const auto& n : arrays) {
    auto ia = a.mem.array_loads.find(n);
    auto ib = b.mem.array_loads.find(n);
    add("loads." + n, ia == a.mem.array_loads.end() ? 0.0 : static_cast<double>(ia->second),
        ib == b.mem.array_loads.end() ? 0.0 : static_cast<double>(ib->second));
  }
  add("energy", energy(a, model), energy(b, model));
  return rep;
}

std::string format_ratio(const std::optional<double>& r) { return r ? num(*r) : "undefined"; }

std::vector<std::pair<std::string, std::string>> stats_fields(const SimStats& s, const EnergyModel& model) {
  std::vector<std::pair<std::string, std::string>> f;
  auto u = [&](const std::string& k, std::uint64_t v) { f.emplace_back(k, std::to_string(v)); };
  auto i = [&](const std::string& k, std::int64_t v) { f.emplace_back(k, std::to_string(v)); };
  i("cycles", s.cycles);
  i("threads", s.threads);
  u("firings", s.total_firings);
  for (const char* cls : {"alu", "fpu", "special", "ldst", "splitjoin", "control_elevator", "lvc"})
    u(std::string("firings.") + cls, static_cast<std::uint64_t>(count(s.firings_by_class, cls)));
  u("retagged", s.retagged);
  u("constants", s.constants);
  u("drops", s.drops);
  u("spills", s.spills);
  u("lvc_accesses", s.lvc_accesses);
  u("noc_hops", s.noc_hops);
  u("eldst_loads", s.eldst_loads);
  u("eldst_forwards", s.eldst_forwards);
  u("eldst_discards", s.eldst_discards);
  i("max_buffer_occupancy", s.max_buffer_occupancy);
  i("buffer_capacity", s.buffer_capacity);
  u("residual_tokens", s.residual_tokens);
  f.emplace_back("conservation", s.conservation_ok() ? "ok" : "violated");
  u("mem.loads", s.mem.loads);
  u("mem.stores", s.mem.stores);
  u("mem.l1_hits", s.mem.l1_hits);
  u("mem.l1_misses", s.mem.l1_misses);
  u("mem.l2_hits", s.mem.l2_hits);
  u("mem.l2_misses", s.mem.l2_misses);
  u("mem.dram_accesses", s.mem.dram_accesses);
  u("mem.writebacks", s.mem.writebacks);
  for (const auto& [n, c] : s.mem.array_loads) u("loads." + n, c);
  for (const auto& [n, c] : s.mem.array_stores) u("stores." + n, c);
  f.emplace_back("energy", num(energy(s, model)));
  return f;
}

void write_stats_text(const SimStats& s, const EnergyModel& model, std::ostream& os) {
  for (const auto& [k, v] : stats_fields(s, model)) os << k << " = " << v << "\n";
}

void write_stats_csv(const SimStats& s, const EnergyModel& model, std::ostream& os) {
  auto f = stats_fields(s, model);
  for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i].first;
  os << "\n";
  for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i].second;
  os << "\n";
}

}  // namespace dmt
