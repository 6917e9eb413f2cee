#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sddelab {

/// Raised when an experiment configuration is rejected; carries the offending field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Raised when an integration produces a non-finite state. Blow-up indicates a
/// mis-specified problem, so it is reported (with the step where it happened)
/// rather than clamped.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(std::int64_t step, double value, const std::string& message)
      : std::runtime_error(message), step_(step), value_(value) {}

  std::int64_t step() const noexcept { return step_; }
  double value() const noexcept { return value_; }

 private:
  std::int64_t step_;
  double value_;
};

}  // namespace sddelab
