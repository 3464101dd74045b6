#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dmt/graph.hpp"
#include "dmt/scalar.hpp"

namespace dmt::ast {

struct SourceLoc {
  int line = 1;
  int col = 1;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
  IntLit,
  FloatLit,
  Var,        // local variable, const or loop variable
  ThreadIdx,  // dim 0..2, or TidSource::kLinearTid for `tid`
  BlockDim,   // dim 0..2
  Index,      // array element: name + one index per declared dimension
  Unary,
  Binary,
  Ternary,
  Call,       // sqrt, exp, abs, min, max, float, int
  FromThreadOrConst,
  FromThreadOrMem,
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceLoc loc;
  std::int64_t ival = 0;
  double fval = 0.0;
  int dim = 0;
  std::string name;  // variable, array, callee or communicated variable
  Opcode op = Opcode::Add;
  std::vector<ExprPtr> args;  // operands / indices / call arguments
  // Communication intrinsics.
  std::vector<ExprPtr> delta;  // one constant expression per dimension
  ExprPtr constant;            // fromThreadOrConst fallback
  ExprPtr window;              // optional
  ExprPtr predicate;           // fromThreadOrMem
};

enum class StmtKind { Decl, Assign, Store, If, For, TagValue, Block };

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
  StmtKind kind = StmtKind::Block;
  SourceLoc loc;
  std::string name;             // variable / array / loop variable
  ScalarKind type = ScalarKind::Int;  // Decl
  std::vector<ExprPtr> indices;  // Store
  ExprPtr value;                 // Decl/Assign/Store value; If condition
  std::vector<StmtPtr> body;     // Block / If-then / For body
  std::vector<StmtPtr> else_body;
  bool has_else = false;
  // For: var = init; var <cmp> limit; var += step
  ExprPtr init;
  ExprPtr limit;
  Opcode cmp = Opcode::Lt;
  ExprPtr step;
};

struct ConstDecl {
  std::string name;
  ExprPtr value;
  SourceLoc loc;
};

struct ArrayDeclAst {
  std::string name;
  ScalarKind type = ScalarKind::Int;
  std::vector<ExprPtr> dims;
  SourceLoc loc;
};

struct KernelAST {
  std::string name;
  std::vector<ConstDecl> consts;
  std::vector<ArrayDeclAst> arrays;
  std::vector<StmtPtr> body;
};

/// Counts of AST constructs, for tests and lowering cross-checks.
struct AstCounts {
  std::size_t loads = 0;
  std::size_t stores = 0;
  std::size_t from_thread_or_const = 0;
  std::size_t from_thread_or_mem = 0;
  std::size_t tag_values = 0;
  std::size_t statements = 0;
};

/// Counts constructs syntactically (loops counted once, not unrolled).
AstCounts count(const KernelAST& kernel);

}  // namespace dmt::ast
