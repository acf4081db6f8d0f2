#pragma once

#include <stdexcept>
#include <string>

namespace canlab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two objects live on incompatible lattices (Z vs Z+1/2, line vs ring).
class LatticeMismatch : public Error {
 public:
  using Error::Error;
};

// A configuration is outside the boundary class an operation requires.
class BoundaryClassError : public Error {
 public:
  using Error::Error;
};

// Malformed user input: rate tables, literals, operator shapes.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A requested computation exceeds a hard size limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace canlab
