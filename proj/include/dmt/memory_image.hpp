#pragma once

#include <map>
#include <string>
#include <vector>

#include "dmt/scalar.hpp"

namespace dmt {

/// Contents of every global array, keyed by array name.
using MemoryImage = std::map<std::string, std::vector<Scalar>>;

}  // namespace dmt
