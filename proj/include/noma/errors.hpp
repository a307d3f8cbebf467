#pragma once

#include <stdexcept>
#include <string>

namespace noma {

/// Invalid numeric input to a model function (non-positive variance, negative power, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke an interface precondition (order/component mismatch, missing link gain).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A power allocation that exceeds its phase budget.
class ConstraintViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed scenario or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::invalid_argument(what), line_(line) {}

  /// 1-based source line, 0 when unknown.
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace noma
