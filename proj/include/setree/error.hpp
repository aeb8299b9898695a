#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace setree {

/// Base class for every error raised by the library. Errors that derive
/// from `Error` (and not `InternalError`) are caused by bad user input or
/// configuration.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

/// Tree and graph disagree, or a tree fails validation where a valid one is required.
class ConsistencyError : public Error {
public:
  using Error::Error;
};

class SizeError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// A broken internal invariant. Never caused by input.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace setree
