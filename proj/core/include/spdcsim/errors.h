#pragma once

#include <stdexcept>
#include <string>

namespace spdcsim {

// Input outside the domain of a physical model (wavelength window, oven
// range, non-finite parameter, ...). The message names the parameter.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical analysis step could not produce a meaningful result
// (unbracketed half maximum, flat fringe, rank-deficient projector set).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration text could not be parsed or failed validation. `line()` is
// 1-based, or 0 when the error is not tied to a source line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                    : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace spdcsim
