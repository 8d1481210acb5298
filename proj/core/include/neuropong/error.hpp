#pragma once

#include <stdexcept>
#include <string>

namespace neuropong {

// Invalid argument to an operation: bad index, negative rate, shape mismatch.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Inconsistent or unusable configuration, detected before any simulation runs.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A rank correlation was requested on data with zero variance.
class UndefinedCorrelationError : public std::domain_error {
 public:
  explicit UndefinedCorrelationError(const std::string& what) : std::domain_error(what) {}
};

// Malformed or truncated on-disk artifact (log, snapshot, report).
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace neuropong
