#pragma once

#include <string>

#include "dmt/config.hpp"
#include "dmt/frontend.hpp"
#include "dmt/mapper.hpp"
#include "dmt/sim.hpp"

namespace dmt {

/// A kernel carried through every compile stage.
struct CompiledKernel {
  ast::KernelAST ast;
  DataflowGraph lowered;  // straight from the frontend
  DataflowGraph graph;    // after cascade/loop expansion and spilling
  std::size_t cascades = 0;
  std::size_t loops = 0;
  std::size_t spills = 0;
  Mapping mapping;
};

/// parse -> lower -> expand_comm -> validate -> spill -> place_and_route.
CompiledKernel compile(const ast::KernelAST& kernel, const ThreadSpace& space, const GridConfig& grid,
                       const Defines& defines = {});
CompiledKernel compile_source(const std::string& source, const ThreadSpace& space, const GridConfig& grid,
                              const Defines& defines = {});

SimResult run(const CompiledKernel& kernel, const GridConfig& grid, const MemoryImage& inputs,
              const SimOptions& options = {});

}  // namespace dmt
