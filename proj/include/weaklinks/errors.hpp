#pragma once

#include <stdexcept>
#include <string>

namespace weaklinks {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed networks, inconsistent parameters, contract violations.
struct ValidationError : Error {
  using Error::Error;
};

/// A requested computation exceeds a configured size cap.
struct CapacityError : Error {
  using Error::Error;
};

/// A linear solve or other numerical step failed its residual contract.
struct NumericalError : Error {
  using Error::Error;
};

/// Malformed config or data file.
struct ParseError : Error {
  using Error::Error;
};

/// Internal consistency violation; indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace weaklinks
