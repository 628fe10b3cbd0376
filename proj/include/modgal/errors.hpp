#pragma once

#include <stdexcept>
#include <string>

namespace modgal {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Any failure cured by raising the working precision (rank instability,
// unrecognized rationals, failed Newton convergence).
struct PrecisionError : Error {
  using Error::Error;
};

struct RankUnstable : PrecisionError {
  using PrecisionError::PrecisionError;
};

struct BadPrime : Error {
  using Error::Error;
};

struct ConfigExcluded : Error {
  using Error::Error;
};

// Random choices landed on a degenerate configuration; retry with new ones.
struct NonGeneric : Error {
  using Error::Error;
};

}  // namespace modgal
