#pragma once

#include <stdexcept>
#include <string>

namespace imutube {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the offending line (1-based, 0 if unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        source_(source),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// Inputs violate an operation's preconditions.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Configuration rejected by schema validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace imutube
