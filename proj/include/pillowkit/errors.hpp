#pragma once

#include <stdexcept>
#include <string>

namespace pillowkit {

/// Base class for every failure raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define PILLOWKIT_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  };

// torus dynamics
PILLOWKIT_DEFINE_ERROR(DivergenceTooLarge)
PILLOWKIT_DEFINE_ERROR(BudgetInfeasible)
PILLOWKIT_DEFINE_ERROR(NonPrimitiveDirection)
PILLOWKIT_DEFINE_ERROR(InverseFailed)
PILLOWKIT_DEFINE_ERROR(DegenerateForm)
// pillowcase
PILLOWKIT_DEFINE_ERROR(AmbiguousLift)
PILLOWKIT_DEFINE_ERROR(PointOnGraph)
// knots
PILLOWKIT_DEFINE_ERROR(InvalidPeripheral)
PILLOWKIT_DEFINE_ERROR(NoConvergence)
PILLOWKIT_DEFINE_ERROR(AbelianizationNontrivial)
PILLOWKIT_DEFINE_ERROR(NoIntersection)
// certificates
PILLOWKIT_DEFINE_ERROR(IndexOutOfRange)
PILLOWKIT_DEFINE_ERROR(SearchSpaceTooLarge)
// io
PILLOWKIT_DEFINE_ERROR(SchemaError)

#undef PILLOWKIT_DEFINE_ERROR

}  // namespace pillowkit
