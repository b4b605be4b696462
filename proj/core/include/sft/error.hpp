#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sft {

enum class ErrorKind { domain, config, usage, numeric, capacity, constraint };

/// Base of every error the library throws. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& w) : Error(ErrorKind::usage, w) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::numeric, w) {}
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& w) : Error(ErrorKind::capacity, w) {}
};

struct ConstraintError : Error {
  explicit ConstraintError(const std::string& w) : Error(ErrorKind::constraint, w) {}
};

/// Carries every violated invariant, not only the first one.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

const char* to_string(ErrorKind kind);

}  // namespace sft
