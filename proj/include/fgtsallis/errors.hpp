#pragma once

#include <stdexcept>
#include <string>

namespace fgt {

// Base class for every error raised by the library. Each concrete type
// corresponds to one failure mode a caller may want to handle separately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FGT_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  };

FGT_DEFINE_ERROR(InvalidParams)
FGT_DEFINE_ERROR(SizeLimitExceeded)
FGT_DEFINE_ERROR(InvalidSubset)
FGT_DEFINE_ERROR(InvalidDistribution)
FGT_DEFINE_ERROR(DomainError)
FGT_DEFINE_ERROR(NonFiniteInput)
FGT_DEFINE_ERROR(MissingSelfLoop)
FGT_DEFINE_ERROR(NotStronglyObservable)
FGT_DEFINE_ERROR(DegenerateProbability)
FGT_DEFINE_ERROR(ParseError)
FGT_DEFINE_ERROR(ConfigError)

#undef FGT_DEFINE_ERROR

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Wraps a module error with the protocol round in which it happened.
class RunAborted : public Error {
 public:
  RunAborted(long round, const std::string& cause)
      : Error("run aborted at round " + std::to_string(round) + ": " + cause),
        round_(round) {}
  long round() const { return round_; }

 private:
  long round_;
};

}  // namespace fgt
