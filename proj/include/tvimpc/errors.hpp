#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tvimpc {

// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TVIMPC_DEFINE_ERROR(Name)         \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

TVIMPC_DEFINE_ERROR(DimensionError)
TVIMPC_DEFINE_ERROR(SingularMatrix)
TVIMPC_DEFINE_ERROR(NonConvergence)
TVIMPC_DEFINE_ERROR(TransformSingular)
TVIMPC_DEFINE_ERROR(SingularSystem)
TVIMPC_DEFINE_ERROR(SingularResolvent)
TVIMPC_DEFINE_ERROR(UnobservablePair)
TVIMPC_DEFINE_ERROR(UnstablePoleRequest)
TVIMPC_DEFINE_ERROR(UnstableObserver)
TVIMPC_DEFINE_ERROR(BoundsViolated)
TVIMPC_DEFINE_ERROR(Infeasible)
TVIMPC_DEFINE_ERROR(NumericalBreakdown)
TVIMPC_DEFINE_ERROR(SingularM)
TVIMPC_DEFINE_ERROR(NotCertified)
TVIMPC_DEFINE_ERROR(EmptyWindow)
TVIMPC_DEFINE_ERROR(ValidationError)

#undef TVIMPC_DEFINE_ERROR

// Raised when |y| leaves the configured saturation bound.
class DivergenceDetected : public Error {
 public:
  DivergenceDetected(std::int64_t step, double value)
      : Error("output diverged at step " + std::to_string(step) +
              " (|y| = " + std::to_string(value) + ")"),
        step_(step),
        value_(value) {}

  std::int64_t step() const { return step_; }
  double value() const { return value_; }

 private:
  std::int64_t step_;
  double value_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tvimpc
