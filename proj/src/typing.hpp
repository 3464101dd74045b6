#pragma once

#include <string>

#include "dmt/error.hpp"
#include "dmt/graph.hpp"

// Typing rules shared by the lowering pass and the reference interpreter.
namespace dmt::typing {

enum class OpClass { Arith, Compare, Logical, Bitwise };

inline OpClass op_class(Opcode op) {
  switch (op) {
    case Opcode::Eq:
    case Opcode::Ne:
    case Opcode::Lt:
    case Opcode::Le:
    case Opcode::Gt:
    case Opcode::Ge:
      return OpClass::Compare;
    case Opcode::LogAnd:
    case Opcode::LogOr:
    case Opcode::LogNot:
      return OpClass::Logical;
    case Opcode::Shl:
    case Opcode::Shr:
    case Opcode::BitAnd:
    case Opcode::BitOr:
    case Opcode::BitXor:
    case Opcode::BitNot:
      return OpClass::Bitwise;
    default:
      return OpClass::Arith;
  }
}

inline ScalarKind common(ScalarKind a, ScalarKind b) {
  return (a == ScalarKind::Float || b == ScalarKind::Float) ? ScalarKind::Float : ScalarKind::Int;
}

/// Type both operands are converted to before applying `op`.
inline ScalarKind operand_type(Opcode op, ScalarKind a, ScalarKind b) {
  switch (op_class(op)) {
    case OpClass::Arith:
    case OpClass::Compare:
      return common(a, b);
    case OpClass::Logical:
      return ScalarKind::Int;  // operands tested for truth, never converted
    case OpClass::Bitwise:
      return ScalarKind::Int;
  }
  return ScalarKind::Int;
}

inline ScalarKind result_type(Opcode op, ScalarKind operand) {
  return op_class(op) == OpClass::Arith ? operand : ScalarKind::Int;
}

/// Function-call builtins: the operand type they compute in.
inline ScalarKind call_operand_type(const std::string& name, ScalarKind a, ScalarKind b) {
  if (name == "sqrt" || name == "exp" || name == "float") return ScalarKind::Float;
  if (name == "int") return ScalarKind::Int;
  if (name == "min" || name == "max") return common(a, b);
  return a;  // abs
}

inline Opcode call_opcode(const std::string& name) {
  if (name == "sqrt") return Opcode::Sqrt;
  if (name == "exp") return Opcode::Exp;
  if (name == "abs") return Opcode::Abs;
  if (name == "min") return Opcode::Min;
  if (name == "max") return Opcode::Max;
  if (name == "float") return Opcode::ToFloat;
  return Opcode::ToInt;
}

}  // namespace dmt::typing
