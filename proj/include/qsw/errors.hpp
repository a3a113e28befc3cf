#pragma once

#include <stdexcept>
#include <string>

namespace qsw {

// Unrecoverable numerical situation: singular interconnection, non-physical
// input, iteration failed to converge. Callers distinguish the broad classes
// below for exit-code mapping; everything derives from std::runtime_error.

struct SingularNetworkError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrequencyMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : ValidationError {
  using ValidationError::ValidationError;
};

struct UnsupportedStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qsw
