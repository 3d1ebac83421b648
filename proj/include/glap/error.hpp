#pragma once

#include <stdexcept>
#include <string>

namespace glap {

// Base of every error raised by the library. Modules throw the narrowest
// subclass so that callers (notably the CLI) can map them to messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

// A precondition on arguments was violated (nonpositive epsilon, point outside
// the domain, invalid schedule, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A moment integral required by an operator diverges for the given kernel.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature exhausted its refinement budget without meeting the
// requested tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

// The requested analytic object (cone, boundary data) is not available for
// this domain kind or point.
class Unsupported : public Error {
 public:
  using Error::Error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

inline void require_dim(std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionMismatch(expected, got);
}

}  // namespace glap
