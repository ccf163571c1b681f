#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Machine-readable error category, used by the CLI for exit codes and by
// callers that want to branch without string matching.
enum class ErrorCategory {
  domain,           // argument outside its mathematical domain
  contract,         // mismatched sizes/geometries between arguments
  window_overflow,  // light cone reached the edge of a finite line window
  numeric,          // solver failure or accuracy check tripped
  config,           // invalid experiment configuration
  io                // file system errors
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::contract: return "contract";
    case ErrorCategory::window_overflow: return "window_overflow";
    case ErrorCategory::numeric: return "numeric";
    case ErrorCategory::config: return "config";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

struct ContractViolation : Error {
  explicit ContractViolation(const std::string& what) : Error(ErrorCategory::contract, what) {}
};

struct WindowOverflow : Error {
  explicit WindowOverflow(const std::string& what)
      : Error(ErrorCategory::window_overflow, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace qwalk
