#pragma once

#include <stdexcept>
#include <string>

namespace rigkit {

// Base class for all rigkit errors. Subclasses mirror the failure modes of
// the public API so callers can catch a specific condition or the family.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DegenerateRotationError : public Error {
 public:
  using Error::Error;
};

class NotARotationError : public Error {
 public:
  using Error::Error;
};

class DegenerateFrameError : public Error {
 public:
  using Error::Error;
};

class SizeMismatchError : public Error {
 public:
  using Error::Error;
};

class InvalidRotationError : public Error {
 public:
  using Error::Error;
};

class InvalidConfigError : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRangeError : public Error {
 public:
  using Error::Error;
};

class EmptyMeshError : public Error {
 public:
  using Error::Error;
};

class EmptySetError : public Error {
 public:
  using Error::Error;
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

class NotStochasticError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class UnidentifiableError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class NonPositiveDtError : public Error {
 public:
  using Error::Error;
};

// Parse failure with position information. line/column are 1-based; column 0
// means "whole line".
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column = 0)
      : Error(msg + " (line " + std::to_string(line) +
              (column > 0 ? ", column " + std::to_string(column) : "") + ")"),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnsupportedChannelError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace rigkit
