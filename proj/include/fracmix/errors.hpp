#pragma once

#include <stdexcept>
#include <string>

namespace fracmix {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: malformed partitions, counts below minima, unknown keys.
// The CLI maps these to exit status 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// Failures inside a numerical pipeline. The CLI maps these to exit status 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define FRACMIX_ERROR(Name, Base)                 \
  class Name : public Base {                      \
   public:                                        \
    explicit Name(const std::string& what)        \
        : Base(std::string(#Name ": ") + what) {} \
  };

FRACMIX_ERROR(ConfigError, InputError)
FRACMIX_ERROR(DomainError, InputError)
FRACMIX_ERROR(OverlapError, InputError)
FRACMIX_ERROR(CoverageError, InputError)
FRACMIX_ERROR(MeasureError, InputError)
FRACMIX_ERROR(UnboundedSigma2Error, InputError)

FRACMIX_ERROR(SingularityError, NumericalError)
FRACMIX_ERROR(QuadratureError, NumericalError)
FRACMIX_ERROR(ConsistencyError, NumericalError)
FRACMIX_ERROR(SingularMatrixError, NumericalError)
FRACMIX_ERROR(ConvergenceError, NumericalError)
FRACMIX_ERROR(StepError, NumericalError)
FRACMIX_ERROR(NonterminationError, NumericalError)
FRACMIX_ERROR(RatioError, NumericalError)

#undef FRACMIX_ERROR

}  // namespace fracmix
