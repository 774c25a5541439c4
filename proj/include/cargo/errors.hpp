#pragma once

#include <stdexcept>
#include <string>

namespace cargo {

// Input outside the mathematical domain of an operation (bad interval, shape < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent scenario / plan configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative method failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact state enumeration would exceed the configured budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A pricing policy has no price for a (period, state, type) it was asked about.
class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary dump / CSV could not be read back.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cargo
