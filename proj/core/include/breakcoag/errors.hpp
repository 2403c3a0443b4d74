#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace breakcoag {

// Invalid configuration: bad parameter ranges, incompatible families,
// unknown or missing config keys.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside an evaluator's domain (table lookup miss, non-integrable
// moment order, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Malformed or unusable input data (CSV tables, profiles).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Time integration could not proceed. `diagnostics()` carries the state of
// the integrator at the point of failure.
class IntegrationError : public std::runtime_error {
public:
  IntegrationError(const std::string& what, nlohmann::json diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const nlohmann::json& diagnostics() const noexcept { return diagnostics_; }

private:
  nlohmann::json diagnostics_;
};

}  // namespace breakcoag
