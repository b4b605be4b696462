#include "sft/error.hpp"

namespace sft {

namespace {
std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid configuration";
  for (const auto& s : v) out += "\n  - " + s;
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorKind::config, join(violations)), violations_(std::move(violations)) {}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::config: return "config";
    case ErrorKind::usage: return "usage";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::constraint: return "constraint";
  }
  return "unknown";
}

}  // namespace sft
