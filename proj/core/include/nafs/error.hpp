#pragma once

#include <stdexcept>
#include <string>

namespace nafs {

// Malformed or inconsistent user-supplied data (files, graphs, labels,
// dimension mismatches discovered at runtime). The CLI maps this to exit 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Out-of-domain arguments (r outside [0,1], negative step counts, ...).
class ParamError : public std::invalid_argument {
 public:
  explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace nafs
