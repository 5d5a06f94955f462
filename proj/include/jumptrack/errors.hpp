#pragma once

#include <stdexcept>
#include <string>

namespace jumptrack {

// Error categories map onto CLI exit codes: config = 2, io = 3, numeric = 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jumptrack
