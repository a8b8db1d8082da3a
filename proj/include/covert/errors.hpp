#pragma once

#include <stdexcept>
#include <string>

namespace covert {

// Bad input document / malformed channel or experiment description. CLI exit 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parameters that are well-formed but cannot be realized (memory ceiling,
// unreachable budget, violated standing assumptions). CLI exit 3.
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace covert
