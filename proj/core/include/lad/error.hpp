#pragma once

#include <stdexcept>
#include <string>

namespace lad {

/// Invalid user configuration: bad flags, impossible hyperparameters,
/// missing input paths. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Problems with the content of input files: malformed rows, non-finite
/// values, schema mismatches. CLI maps this to exit code 3.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lad
