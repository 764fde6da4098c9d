#pragma once

#include <stdexcept>
#include <string>

namespace tailrisk {

// Invalid configuration or arguments supplied by the caller (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown that survived the repair strategies (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tailrisk
