#pragma once

#include <stdexcept>
#include <string>

namespace dmetrics {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed domain parameters, dimension mismatches, bad arguments.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A query point that must lie in the domain does not.
class OutsideDomain : public Error {
 public:
  using Error::Error;
};

/// Discretization failures: grid too coarse, node cap exceeded,
/// query points not connected at the current resolution.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace dmetrics
