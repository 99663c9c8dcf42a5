#pragma once

#include <stdexcept>
#include <string>

namespace warpwave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Array length or layout does not match what an operation requires.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A numeric argument is outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Unknown enumeration name or unsupported option combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(what), line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace warpwave
