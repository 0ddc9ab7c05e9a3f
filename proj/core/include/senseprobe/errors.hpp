#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace senseprobe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value outside the supported domain (e.g. a number outside [1, 2000]).
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Text could not be parsed; `token()` holds the offending fragment.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string token)
      : Error(message), token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

/// Input file rejected. `line()` is 1-based, 0 when not tied to a line.
class LoadError : public Error {
 public:
  LoadError(const std::string& message, std::size_t line = 0)
      : Error(line ? message + " (line " + std::to_string(line) + ")" : message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Inconsistent configuration, e.g. overlapping answer classes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A template placeholder had no value, or was lost during sense generation.
class PlaceholderError : public Error {
 public:
  PlaceholderError(const std::string& message, std::string placeholder)
      : Error(message), placeholder_(std::move(placeholder)) {}
  const std::string& placeholder() const noexcept { return placeholder_; }

 private:
  std::string placeholder_;
};

/// Two runs do not cover the same datapoints.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given sample (zero variance, n = 0, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Transient transport failure that survived all retries.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int status = 0)
      : Error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Non-retryable failure reported by the backend (HTTP 4xx other than 429).
class PermanentError : public TransportError {
 public:
  using TransportError::TransportError;
};

/// Synthetic models raise this when the request falls outside their table.
class LookupError : public Error {
 public:
  using Error::Error;
};

}  // namespace senseprobe
