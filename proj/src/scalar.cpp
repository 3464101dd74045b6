#include "dmt/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "dmt/error.hpp"

namespace dmt {

std::string_view stage_name(Stage stage) noexcept {
  switch (stage) {
    case Stage::Graph: return "graph";
    case Stage::Frontend: return "frontend";
    case Stage::Mapper: return "mapper";
    case Stage::Sim: return "sim";
    case Stage::Memsys: return "memsys";
    case Stage::Stats: return "stats";
    case Stage::Cli: return "cli";
  }
  return "unknown";
}

std::int64_t Scalar::as_int() const noexcept {
  if (!is_float()) return i;
  // Truncation toward zero; NaN and out-of-range values saturate.
  if (std::isnan(f)) return 0;
  if (f >= 9.2233720368547758e18) return std::numeric_limits<std::int64_t>::max();
  if (f <= -9.2233720368547758e18) return std::numeric_limits<std::int64_t>::min();
  return static_cast<std::int64_t>(f);
}

Scalar Scalar::convert(ScalarKind to) const noexcept {
  if (to == kind) return *this;
  return to == ScalarKind::Float ? of_float(as_float()) : of_int(as_int());
}

std::string to_string(const Scalar& s) {
  if (!s.is_float()) return std::to_string(s.i);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", s.f);
  return buf;
}

Scalar parse_scalar(const std::string& text, ScalarKind kind) {
  if (text.empty()) throw ParameterError(Stage::Cli, "empty scalar");
  std::size_t used = 0;
  try {
    if (kind == ScalarKind::Int) {
      auto v = std::stoll(text, &used);
      if (used == text.size()) return Scalar::of_int(v);
      // Accept "3.0" for integer arrays when it is integral.
      double d = std::stod(text, &used);
      if (used == text.size() && d == std::floor(d)) return Scalar::of_int(static_cast<std::int64_t>(d));
    } else {
      double d = std::stod(text, &used);
      if (used == text.size()) return Scalar::of_float(d);
    }
  } catch (const std::exception&) {
  }
  throw ParameterError(Stage::Cli, "bad scalar '" + text + "'");
}

}  // namespace dmt
