#pragma once

#include <stdexcept>
#include <string>

namespace addigit {

// Bad user input: malformed function config, invalid flag combination.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A request that would blow the configured memory / size budget.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Overflow, poles, non-finite intermediates.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace addigit
