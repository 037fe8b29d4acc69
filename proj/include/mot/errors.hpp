#pragma once

#include <stdexcept>
#include <string>

namespace mot {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text or file (bad number, bad JSON shape).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A precondition on argument values was violated (negative weight, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EmptyMeasure : public Error {
 public:
  EmptyMeasure() : Error("measure has no atom with positive weight") {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownPayoff : public Error {
 public:
  using Error::Error;
};

class NotInConvexOrder : public Error {
 public:
  using Error::Error;
};

/// Raised when a state the construction proves unreachable is reached.
class InternalInvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The hedge completion problem has no feasible point: the monotone plan
/// is not optimal for the supplied payoff.
class CompletionInfeasible : public Error {
 public:
  using Error::Error;
};

class ArbitrageViolation : public Error {
 public:
  using Error::Error;
};

class IncompleteCurve : public Error {
 public:
  using Error::Error;
};

}  // namespace mot
