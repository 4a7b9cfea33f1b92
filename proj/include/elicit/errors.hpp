#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace elicit {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric input outside an operation's domain (e.g. a non-positive speed).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a precondition: length mismatch, incomplete input, bad index.
class ContractError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A response that does not fit the current phase or the presented stimuli.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class DuplicateResponse : public ProtocolViolation {
 public:
  using ProtocolViolation::ProtocolViolation;
};

/// A comparison answered out of schedule order.
class SequencingViolation : public ProtocolViolation {
 public:
  using ProtocolViolation::ProtocolViolation;
};

/// Comparison graph does not identify the Bradley-Terry strengths.
class NonIdentifiableError : public Error {
 public:
  NonIdentifiableError(const std::string& what,
                       std::vector<std::vector<int>> components)
      : Error(what), components_(std::move(components)) {}

  const std::vector<std::vector<int>>& components() const {
    return components_;
  }

 private:
  std::vector<std::vector<int>> components_;
};

/// All strengths equal: there is no preference signal to rescale.
class DegenerateScaleError : public Error {
 public:
  using Error::Error;
};

/// Raised when a prompt is requested from a finished session.
class SessionFinished : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

}  // namespace elicit
