#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ridgeguard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual or binary input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input parsed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Matrix or table shapes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Serialized payloads with the wrong version or schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ridgeguard
