#pragma once

#include <bit>
#include <cstdint>
#include <string>

namespace dmt {

enum class ScalarKind : std::uint8_t { Int, Float };

/// 64-bit kind-tagged scalar carried by every token. Integer arithmetic wraps.
struct Scalar {
  ScalarKind kind = ScalarKind::Int;
  std::int64_t i = 0;
  double f = 0.0;

  static constexpr Scalar of_int(std::int64_t v) { return Scalar{ScalarKind::Int, v, 0.0}; }
  static constexpr Scalar of_float(double v) { return Scalar{ScalarKind::Float, 0, v}; }
  static constexpr Scalar zero(ScalarKind k) {
    return k == ScalarKind::Int ? of_int(0) : of_float(0.0);
  }

  bool is_float() const noexcept { return kind == ScalarKind::Float; }
  double as_float() const noexcept { return is_float() ? f : static_cast<double>(i); }
  std::int64_t as_int() const noexcept;
  bool truthy() const noexcept { return is_float() ? f != 0.0 : i != 0; }
  Scalar convert(ScalarKind to) const noexcept;

  /// Bit-exact equality (floats compared by representation).
  friend bool operator==(const Scalar& a, const Scalar& b) noexcept {
    if (a.kind != b.kind) return false;
    return a.is_float() ? std::bit_cast<std::uint64_t>(a.f) == std::bit_cast<std::uint64_t>(b.f)
                        : a.i == b.i;
  }
};

/// Decimal for ints; round-trippable %.17g for floats.
std::string to_string(const Scalar& s);

/// Parses "12", "-3", "1.5", "1e-3"; a '.', 'e' or 'inf'/'nan' makes it a float.
Scalar parse_scalar(const std::string& text, ScalarKind kind);

}  // namespace dmt
