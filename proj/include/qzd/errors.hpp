#pragma once

#include <stdexcept>
#include <string>

namespace qzd {

// Base of every exception thrown by the library. The CLI maps Error subclasses
// other than NumericalFailure to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Eigenvalue clusters too close to separate at the requested width.
class AmbiguousClustering : public Error {
 public:
  using Error::Error;
};

class DegenerateStructure : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace qzd
