#include "dmt/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "dmt/error.hpp"

namespace dmt {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Field {
  std::function<void(GridConfig&, const std::string&)> set;
  std::function<std::string(const GridConfig&)> get;
};

std::int64_t parse_int(const std::string& key, const std::string& v, std::int64_t min_value) {
  std::size_t pos = 0;
  std::int64_t x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ParameterError(Stage::Mapper, key + ": expected an integer, got '" + v + "'");
  if (x < min_value) throw ParameterError(Stage::Mapper, key + " must be >= " + std::to_string(min_value));
  return x;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw ParameterError(Stage::Mapper, key + ": expected a number, got '" + v + "'");
  if (!(x >= 0)) throw ParameterError(Stage::Mapper, key + " must be >= 0");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw ParameterError(Stage::Mapper, key + ": expected a boolean, got '" + v + "'");
}

template <class Get>
Field ints(Get get, std::int64_t min_value) {
  return Field{[get, min_value](GridConfig& c, const std::string& v) {
                 auto& ref = get(c);
                 ref = static_cast<std::remove_reference_t<decltype(ref)>>(parse_int("", v, min_value));
               },
               [get](const GridConfig& c) { return std::to_string(get(const_cast<GridConfig&>(c))); }};
}

template <class Get>
Field reals(Get get) {
  return Field{[get](GridConfig& c, const std::string& v) { get(c) = parse_double("", v); },
               [get](const GridConfig& c) {
                 std::ostringstream os;
                 os.precision(17);
                 os << get(const_cast<GridConfig&>(c));
                 return os.str();
               }};
}

template <class Get>
Field bools(Get get) {
  return Field{[get](GridConfig& c, const std::string& v) { get(c) = parse_bool("", v); },
               [get](const GridConfig& c) { return std::string(get(const_cast<GridConfig&>(c)) ? "true" : "false"); }};
}

#define DMT_INT(key, expr, min) {key, ints([](GridConfig& c) -> auto& { return c.expr; }, min)}
#define DMT_REAL(key, expr) {key, reals([](GridConfig& c) -> auto& { return c.expr; })}
#define DMT_BOOL(key, expr) {key, bools([](GridConfig& c) -> auto& { return c.expr; })}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      DMT_INT("alus", alus, 0),
      DMT_INT("fpus", fpus, 0),
      DMT_INT("special_units", special_units, 0),
      DMT_INT("ldst_units", ldst_units, 0),
      DMT_INT("splitjoin_units", splitjoin_units, 0),
      DMT_INT("control_elevator_units", control_elevator_units, 0),
      DMT_INT("token_buffer", token_buffer, 1),
      DMT_INT("noc_hop_latency", noc_hop_latency, 0),
      DMT_INT("grid_cols", grid_cols, 1),
      DMT_INT("latency.alu", alu_latency, 1),
      DMT_INT("latency.fpu", fpu_latency, 1),
      DMT_INT("latency.special", special_latency, 1),
      DMT_INT("latency.control", control_latency, 1),
      DMT_INT("latency.elevator", elevator_latency, 1),
      DMT_INT("latency.splitjoin", splitjoin_latency, 1),
      DMT_INT("initiation_interval", initiation_interval, 1),
      DMT_INT("elevator_pops", elevator_pops, 1),
      DMT_INT("lvc.latency", lvc_latency, -1),
      DMT_INT("l1.size", mem.l1.size_bytes, 1),
      DMT_INT("l1.line", mem.l1.line_bytes, 1),
      DMT_INT("l1.ways", mem.l1.ways, 1),
      DMT_INT("l1.banks", mem.l1.banks, 1),
      DMT_INT("l1.latency", mem.l1.latency, 1),
      DMT_INT("l2.size", mem.l2.size_bytes, 1),
      DMT_INT("l2.line", mem.l2.line_bytes, 1),
      DMT_INT("l2.ways", mem.l2.ways, 1),
      DMT_INT("l2.banks", mem.l2.banks, 1),
      DMT_INT("l2.latency", mem.l2.latency, 1),
      DMT_INT("dram.latency", mem.dram_latency, 1),
      DMT_INT("dram.banks", mem.dram_banks, 1),
      DMT_BOOL("mem.write_back", mem.write_back),
      DMT_BOOL("mem.bank_conflicts", mem.bank_conflicts),
      DMT_INT("mem.mshr_limit", mem.mshr_limit, 0),
      DMT_INT("mem.element_bytes", mem.element_bytes, 1),
      DMT_REAL("energy.alu", energy.alu),
      DMT_REAL("energy.fpu", energy.fpu),
      DMT_REAL("energy.elevator", energy.elevator),
      DMT_REAL("energy.l1", energy.l1),
      DMT_REAL("energy.l2", energy.l2),
      DMT_REAL("energy.dram", energy.dram),
      DMT_REAL("energy.noc_hop", energy.noc_hop),
      DMT_REAL("energy.lvc", energy.lvc),
  };
  return f;
}

}  // namespace

GridConfig parse_grid_config(const std::string& text, GridConfig base) {
  GridConfig cfg = base;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError(Stage::Mapper, "grid config line " + std::to_string(lineno) + ": expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    bool found = false;
    for (const auto& [name, field] : fields())
      if (name == key) {
        try {
          field.set(cfg, value);
        } catch (const ParameterError& e) {
          throw ParameterError(Stage::Mapper, "grid config line " + std::to_string(lineno) + ": " + key +
                                                  std::string(e.what()).substr(std::string("parameter error: ").size()));
        }
        found = true;
      }
    if (!found) throw ParameterError(Stage::Mapper, "grid config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

GridConfig load_grid_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Stage::Mapper, "grid config not found: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_grid_config(os.str());
}

void write_grid_config(const GridConfig& cfg, std::ostream& os) {
  for (const auto& [name, field] : fields()) os << name << " = " << field.get(cfg) << "\n";
}

}  // namespace dmt
