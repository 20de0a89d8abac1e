#ifndef NWS_ERROR_HPP
#define NWS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace nws {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input (files, streams, datasets).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical precondition violated or a computation diverged.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Invalid configuration or unmet operation precondition.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A sentence with no weighted in-vocabulary word has no embedding.
class UnembeddableSentence : public Error {
 public:
  UnembeddableSentence() : Error("unembeddable sentence") {}
};

}  // namespace nws

#endif  // NWS_ERROR_HPP
