#pragma once

#include <map>
#include <string>
#include <string_view>

#include "dmt/ast.hpp"
#include "dmt/graph.hpp"
#include "dmt/memory_image.hpp"

namespace dmt {

/// Values for `const` declarations, overriding the defaults in the source.
using Defines = std::map<std::string, Scalar>;

/// Parses kernel source. Throws ParseError for syntax errors, undeclared
/// arrays or variables, and loop bounds that are not compile-time constants.
ast::KernelAST parse(std::string_view source);

/// Reads and parses a kernel file. A missing file raises "file not found".
ast::KernelAST parse_file(const std::string& path);

/// Values of every kernel `const` after applying `defines`. Defines that name
/// no const raise LowerError.
std::map<std::string, Scalar> resolve_consts(const ast::KernelAST& kernel, const ThreadSpace& space,
                                             const Defines& defines = {});

/// Resolves array extents against a thread space.
std::vector<ArrayDecl> resolve_arrays(const ast::KernelAST& kernel, const ThreadSpace& space,
                                      const Defines& defines = {});

/// Lowers a parsed kernel to a dataflow graph: loops unrolled, if/else turned
/// into selects with predicated memory operations, one Elevator per
/// fromThreadOrConst, one ELoadStore per fromThreadOrMem, and SplitJoin
/// ordering between same-array memory operations of a thread.
DataflowGraph lower(const ast::KernelAST& kernel, const ThreadSpace& space,
                    const Defines& defines = {});

/// Sequential reference: runs every thread in ascending tid order directly on
/// the AST. Kernels using communication intrinsics are rejected.
void interpret(const ast::KernelAST& kernel, const ThreadSpace& space, MemoryImage& memory,
               const Defines& defines = {});

/// Shared scalar semantics of the lowered graph and the interpreter.
Scalar apply_opcode(Opcode op, const Scalar* args, int n);

}  // namespace dmt
