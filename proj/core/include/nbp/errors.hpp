#pragma once

#include <stdexcept>
#include <string>

namespace nbp {

/// A numerical precondition of an operation does not hold (bad geometry,
/// support leaving the grid, wrap-around in the spectral solver, ...).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid run configuration. `line()` is the 1-based line of the offending
/// entry in the config file, or 0 when the value came from the command line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace nbp
