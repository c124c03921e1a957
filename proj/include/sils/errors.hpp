#pragma once

#include <stdexcept>
#include <string>

namespace sils {

// Invalid configuration (bad level, n < r, malformed budget, ...). CLI exit code 1.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (CSV parse failures, non-finite values, ...). CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sils
