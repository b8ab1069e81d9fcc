#pragma once

#include <stdexcept>
#include <string>

namespace causalscore {

// Base for every error this library throws. `kind()` is the machine-readable
// tag the CLI reports on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Malformed input text (JSON, CSV, config). The message carries a locator.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message) : Error("parse_error", message) {}
};

// Well-formed input that violates a domain invariant.
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message) : Error("invariant_error", message) {}
};

// A caller-side precondition failed (bad arguments, insufficient data).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& message)
      : Error("precondition_error", message) {}
};

// A statistic is mathematically undefined for the given input.
class UndefinedStatistic : public Error {
 public:
  explicit UndefinedStatistic(const std::string& message)
      : Error("undefined_statistic", message) {}
};

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& message) : Error("backend_error", message) {}
  BackendError(std::string kind, const std::string& message) : Error(std::move(kind), message) {}
};

// Remote endpoint unreachable, timed out, or answered 5xx after all retries.
class TransportError : public BackendError {
 public:
  explicit TransportError(const std::string& message) : BackendError("transport_error", message) {}
};

// Remote endpoint answered, but the answer breaks the wire contract.
class ProtocolError : public BackendError {
 public:
  explicit ProtocolError(const std::string& message) : BackendError("protocol_error", message) {}
};

}  // namespace causalscore
