#pragma once

#include <stdexcept>
#include <string>

namespace ewl {

/// Violated mathematical precondition (parameter outside a theorem's hypotheses,
/// undefined exponent, non-positive sample, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Invalid simulator or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure during an otherwise well-posed computation.
class ComputationError : public std::runtime_error {
 public:
  explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ewl
