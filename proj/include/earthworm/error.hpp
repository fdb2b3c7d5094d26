#pragma once

#include <stdexcept>
#include <string>

namespace earthworm {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidDimension : public Error {
 public:
  explicit InvalidDimension(const std::string& msg) : Error(msg) {}
};

class TrackingDisabled : public Error {
 public:
  explicit TrackingDisabled(const std::string& msg) : Error(msg) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& msg) : Error(msg) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& msg) : Error(msg) {}
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& msg) : Error(msg) {}
};

// Raised when a checkpoint or table file cannot be parsed; the message names
// the offending field.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg) {}
};

}  // namespace earthworm
