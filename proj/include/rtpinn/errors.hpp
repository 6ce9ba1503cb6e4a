#pragma once

#include <stdexcept>
#include <string>

namespace rtpinn {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (bad counts, radii, missing fields).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (size mismatch, point off a boundary).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Requested a Sobol dimension or quadrature order outside the supported range.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during evaluation or training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rtpinn
