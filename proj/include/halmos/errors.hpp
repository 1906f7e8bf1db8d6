#pragma once

#include <stdexcept>
#include <string>

namespace halmos {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct StructureError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

// Raised when an index operator is too close to singular for its sign to mean anything.
struct GapTooSmall : DomainError {
  using DomainError::DomainError;
};

struct PresentationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Malformed or unrecognized experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace halmos
