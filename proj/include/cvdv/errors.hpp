#pragma once

#include <stdexcept>
#include <string>

namespace cvdv {

// Root of every domain error raised by the library. Callers that only care
// about "something in the simulation was invalid" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CVDV_DEFINE_ERROR(Name)              \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

CVDV_DEFINE_ERROR(RegistryMismatch);
CVDV_DEFINE_ERROR(RegistryCollision);
CVDV_DEFINE_ERROR(UnknownIndex);
CVDV_DEFINE_ERROR(SameMode);
CVDV_DEFINE_ERROR(ZeroNorm);
CVDV_DEFINE_ERROR(NotNormalized);
CVDV_DEFINE_ERROR(SingularDenominator);
CVDV_DEFINE_ERROR(CutoffTooSmall);
CVDV_DEFINE_ERROR(DegenerateGeometry);
CVDV_DEFINE_ERROR(InvalidCombination);
CVDV_DEFINE_ERROR(Unattainable);
CVDV_DEFINE_ERROR(ConfigError);
CVDV_DEFINE_ERROR(ValidationFailure);

#undef CVDV_DEFINE_ERROR

// Mode lookups report through the same type as spin lookups.
using UnknownMode = UnknownIndex;

}  // namespace cvdv
