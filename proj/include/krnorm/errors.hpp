#pragma once

#include <stdexcept>
#include <string>

namespace krnorm {

// Base for every error raised by the library. The CLI maps all of these to
// exit code 1 (input error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point lies outside the box or has the wrong dimension.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A balanced measure was required but |mass| exceeded the tolerance.
class BalanceError : public Error {
 public:
  using Error::Error;
};

// dipole(x, x, a)
class DegenerateDipoleError : public Error {
 public:
  using Error::Error;
};

// Bad argument value (non-positive tolerance, zero coefficients, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A linear program or truncated decomposition has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Malformed measure / decomposition file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Oracle preconditions (quantization, unit caps) violated.
class OracleLimitError : public Error {
 public:
  using Error::Error;
};

// Family index does not fit the 128-bit pair index or 64-bit point rank.
class IndexOverflowError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace krnorm
