#pragma once

#include <string>

#include "dmt/bench.hpp"

namespace dmt::test {

inline std::vector<Scalar> ivec(std::initializer_list<std::int64_t> v) {
  std::vector<Scalar> out;
  for (auto x : v) out.push_back(Scalar::of_int(x));
  return out;
}

inline SimResult run_source(const std::string& source, const ThreadSpace& space, const MemoryImage& inputs,
                            const GridConfig& grid = {}, const SimOptions& opt = {}, const Defines& defines = {}) {
  return run(compile_source(source, space, grid, defines), grid, inputs, opt);
}

}  // namespace dmt::test
