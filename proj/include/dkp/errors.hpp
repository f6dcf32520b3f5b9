#pragma once

#include <stdexcept>
#include <string>

namespace dkp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lattice dimensions outside the supported range (gcd(N,M) != 1, N or M < 2).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Data that violates a LatticeState invariant, e.g. a vanishing B entry.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Malformed state file or unreadable path.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (degenerate point, singular minor, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A combinatorial identity that must hold by construction did not.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace dkp
