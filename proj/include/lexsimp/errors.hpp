#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexsimp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Maps to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A model backend (sidecar, embedder, generator) failed or is unreachable.
/// Maps to exit code 4.
class BackendError : public Error {
 public:
  BackendError(std::string backend, const std::string& what)
      : Error(backend + ": " + what), backend_(std::move(backend)) {}

  const std::string& backend() const noexcept { return backend_; }

 private:
  std::string backend_;
};

/// Backend answered but produced no candidates at all. Distinct from a list
/// that became empty after post-filtering.
class EmptyBackendOutput : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace lexsimp
