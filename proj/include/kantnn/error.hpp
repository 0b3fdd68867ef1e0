#pragma once

#include <stdexcept>
#include <string>

namespace kantnn {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid kernel token, unsupported order, malformed flag value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Precondition violation on a function argument (shape mismatch, empty input, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Non-finite samples, degenerate denominators, non-converging iterations.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. The message names the byte offset.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace kantnn
