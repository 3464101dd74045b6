#include "dmt/pipeline.hpp"

#include "dmt/error.hpp"

namespace dmt {

CompiledKernel compile(const ast::KernelAST& kernel, const ThreadSpace& space, const GridConfig& grid,
                       const Defines& defines) {
  CompiledKernel k;
  k.ast = kernel;
  k.lowered = lower(kernel, space, defines);
  auto ex = expand_comm(k.lowered, grid);
  k.graph = std::move(ex.graph);
  k.cascades = ex.cascades;
  k.loops = ex.loops;
  auto report = validate(k.graph);
  if (!report.ok()) throw Error(Stage::Graph, "invalid graph: " + report.to_string());
  k.spills = spill(k.graph, ex.overflow);
  k.mapping = place_and_route(k.graph, grid);
  return k;
}

CompiledKernel compile_source(const std::string& source, const ThreadSpace& space, const GridConfig& grid,
                              const Defines& defines) {
  return compile(parse(source), space, grid, defines);
}

SimResult run(const CompiledKernel& kernel, const GridConfig& grid, const MemoryImage& inputs,
              const SimOptions& options) {
  return simulate(kernel.graph, kernel.mapping, grid, inputs, options);
}

}  // namespace dmt
