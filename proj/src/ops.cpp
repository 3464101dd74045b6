#include <cmath>
#include <cstdint>
#include <limits>

#include "dmt/frontend.hpp"

namespace dmt {
namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

// Integer division never traps: x/0 == 0 and MIN/-1 wraps.
std::int64_t int_div(std::int64_t a, std::int64_t b) {
  if (b == 0) return 0;
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) return a;
  return a / b;
}
std::int64_t int_rem(std::int64_t a, std::int64_t b) {
  if (b == 0 || b == -1) return 0;
  return a % b;
}

Scalar compare(Opcode op, const Scalar& a, const Scalar& b) {
  bool r = false;
  if (a.is_float() || b.is_float()) {
    double x = a.as_float(), y = b.as_float();
    switch (op) {
      case Opcode::Eq: r = x == y; break;
      case Opcode::Ne: r = x != y; break;
      case Opcode::Lt: r = x < y; break;
      case Opcode::Le: r = x <= y; break;
      case Opcode::Gt: r = x > y; break;
      default: r = x >= y; break;
    }
  } else {
    std::int64_t x = a.i, y = b.i;
    switch (op) {
      case Opcode::Eq: r = x == y; break;
      case Opcode::Ne: r = x != y; break;
      case Opcode::Lt: r = x < y; break;
      case Opcode::Le: r = x <= y; break;
      case Opcode::Gt: r = x > y; break;
      default: r = x >= y; break;
    }
  }
  return Scalar::of_int(r ? 1 : 0);
}

}  // namespace

Scalar apply_opcode(Opcode op, const Scalar* args, int n) {
  const Scalar& a = args[0];
  const Scalar b = n > 1 ? args[1] : Scalar{};
  switch (op) {
    case Opcode::Eq:
    case Opcode::Ne:
    case Opcode::Lt:
    case Opcode::Le:
    case Opcode::Gt:
    case Opcode::Ge:
      return compare(op, a, b);
    case Opcode::LogAnd: return Scalar::of_int(a.truthy() && b.truthy());
    case Opcode::LogOr: return Scalar::of_int(a.truthy() || b.truthy());
    case Opcode::LogNot: return Scalar::of_int(!a.truthy());
    case Opcode::Select: return a.truthy() ? args[1] : args[2];
    case Opcode::Mux: return a.truthy() ? args[1] : args[2];
    case Opcode::Steer: return b;
    case Opcode::ToFloat: return Scalar::of_float(a.as_float());
    case Opcode::ToInt: return Scalar::of_int(a.as_int());
    case Opcode::Sqrt: return Scalar::of_float(std::sqrt(a.as_float()));
    case Opcode::Exp: return Scalar::of_float(std::exp(a.as_float()));
    default: break;
  }
  if (a.is_float()) {
    double x = a.f, y = b.as_float();
    switch (op) {
      case Opcode::Add: return Scalar::of_float(x + y);
      case Opcode::Sub: return Scalar::of_float(x - y);
      case Opcode::Mul: return Scalar::of_float(x * y);
      case Opcode::Div: return Scalar::of_float(x / y);
      case Opcode::Rem: return Scalar::of_float(std::fmod(x, y));
      case Opcode::Neg: return Scalar::of_float(-x);
      case Opcode::Min: return Scalar::of_float(std::fmin(x, y));
      case Opcode::Max: return Scalar::of_float(std::fmax(x, y));
      case Opcode::Abs: return Scalar::of_float(std::fabs(x));
      default: break;
    }
    return Scalar::of_float(std::nan(""));
  }
  std::int64_t x = a.i, y = b.i;
  switch (op) {
    case Opcode::Add: return Scalar::of_int(wrap_add(x, y));
    case Opcode::Sub: return Scalar::of_int(wrap_sub(x, y));
    case Opcode::Mul: return Scalar::of_int(wrap_mul(x, y));
    case Opcode::Div: return Scalar::of_int(int_div(x, y));
    case Opcode::Rem: return Scalar::of_int(int_rem(x, y));
    case Opcode::Neg: return Scalar::of_int(wrap_sub(0, x));
    case Opcode::Min: return Scalar::of_int(x < y ? x : y);
    case Opcode::Max: return Scalar::of_int(x > y ? x : y);
    case Opcode::Abs: return Scalar::of_int(x < 0 ? wrap_sub(0, x) : x);
    case Opcode::Shl: return Scalar::of_int(static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << (y & 63)));
    case Opcode::Shr: return Scalar::of_int(x >> (y & 63));
    case Opcode::BitAnd: return Scalar::of_int(x & y);
    case Opcode::BitOr: return Scalar::of_int(x | y);
    case Opcode::BitXor: return Scalar::of_int(x ^ y);
    case Opcode::BitNot: return Scalar::of_int(~x);
    default: break;
  }
  return Scalar::of_int(0);
}

}  // namespace dmt
