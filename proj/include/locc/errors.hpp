#pragma once

#include <stdexcept>
#include <string>

namespace locc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent arguments (unknown labels, mismatched dimensions).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Requested Hilbert space exceeds the configured dimension cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented precondition (e.g. an invalid instrument).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A protocol round touches a factor owned by the other party.
class LocalityError : public Error {
 public:
  using Error::Error;
};

/// A sampled estimate has no data to work from.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Configuration problem; `key()` is the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace locc
