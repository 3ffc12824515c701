#pragma once

#include <stdexcept>
#include <string>

namespace romctl {

// Error taxonomy shared across the toolkit. The CLI maps ConfigError to
// exit code 2 and every other Error to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace romctl
