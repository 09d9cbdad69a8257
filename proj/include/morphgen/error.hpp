#pragma once

#include <stdexcept>
#include <string>

namespace morphgen {

// Root of the library's exception hierarchy. The CLI maps each branch to an
// exit code: UsageError -> 1, DataError (and ParseError) -> 2,
// NumericalError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace morphgen
