#pragma once

#include <stdexcept>

namespace orlfb {

/// Base class for all library errors.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter violates an operation's preconditions.
class InvalidParameter : public Error {
  using Error::Error;
};

/// A requested value lies outside the searchable range.
class RangeError : public Error {
  using Error::Error;
};

/// A numerical procedure failed to converge or produced non-finite values.
class NumericError : public Error {
  using Error::Error;
};

/// A structural property that should hold was violated. The message carries
/// the witness point.
class PropertyViolation : public Error {
  using Error::Error;
};

/// The field has no interface between its positive and zero phases.
class NoFreeBoundary : public Error {
  using Error::Error;
};

}  // namespace orlfb
