#pragma once

#include <stdexcept>
#include <string>

namespace wunet {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unsupported file content (image headers, checkpoints, labels).
struct FormatError : Error {
  using Error::Error;
};

// An API precondition was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

// Image or crop geometry that does not divide or match.
struct DimensionError : Error {
  using Error::Error;
};

// Tensor shape mismatch.
struct ShapeError : Error {
  using Error::Error;
};

// Invalid configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// Missing or unreadable data referenced by a manifest or path.
struct DataError : Error {
  using Error::Error;
};

// Training aborted (non-finite loss, unusable sample).
struct TrainingError : Error {
  using Error::Error;
};

}  // namespace wunet
