#pragma once

#include <stdexcept>
#include <string>

namespace qcm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad dimension, zero vector, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Product enumeration grew past its configured item cap.
class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

// The point set spans a proper subspace; its absolutely convex hull has no
// interior.
class DegenerateHull : public Error {
 public:
  using Error::Error;
};

// An analysis could not start because its hypothesis does not hold.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

// The resolvent (wI - A)^{-1} blows up on the unit circle.
class PoleOnCircle : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace qcm
