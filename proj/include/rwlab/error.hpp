#pragma once

#include <stdexcept>
#include <string>

namespace rwlab {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller handed us something outside an operation's domain
// (bad letter index, rank mismatch, trivial class, malformed literal).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A computation would exceed a configured bound (word-length cap,
// enumeration bound, integer range).
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A boundary comparison ran past the certified depth of a truncated point.
class Undecidable : public Error {
 public:
  using Error::Error;
};

// Experiment configuration failed validation. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), message_(what), line_(line) {}
  int line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  int line_;
};

// Violated internal invariant; indicates a bug, never bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rwlab
