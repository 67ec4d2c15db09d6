#pragma once

#include <stdexcept>
#include <string>

namespace lamfam {

/// Failures caused by arithmetic limits: precision, convergence, radius.
/// The CLI maps these to exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Violated hypotheses on the input data. Exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input files. Exit code 3.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

#define LAMFAM_DEFINE_ERROR(Name, Base)                                      \
  class Name : public Base {                                                 \
   public:                                                                   \
    explicit Name(const std::string& what) : Base(#Name ": " + what) {}      \
  };

LAMFAM_DEFINE_ERROR(NonUnit, NumericError)
LAMFAM_DEFINE_ERROR(DomainError, NumericError)
LAMFAM_DEFINE_ERROR(PrecisionLoss, NumericError)
LAMFAM_DEFINE_ERROR(NoConvergence, NumericError)
LAMFAM_DEFINE_ERROR(WeightOutOfRadius, NumericError)
LAMFAM_DEFINE_ERROR(CapMismatch, NumericError)
LAMFAM_DEFINE_ERROR(CapOverflow, NumericError)
LAMFAM_DEFINE_ERROR(CapExhausted, NumericError)
LAMFAM_DEFINE_ERROR(RankDeficient, NumericError)
LAMFAM_DEFINE_ERROR(EigenAmbiguous, NumericError)
LAMFAM_DEFINE_ERROR(InsufficientSamples, NumericError)
LAMFAM_DEFINE_ERROR(InconsistencyFound, NumericError)
LAMFAM_DEFINE_ERROR(ModulusTooLarge, NumericError)

LAMFAM_DEFINE_ERROR(NotCoprime, ValidationError)
LAMFAM_DEFINE_ERROR(Unsupported, ValidationError)
LAMFAM_DEFINE_ERROR(NotSelfDual, ValidationError)
LAMFAM_DEFINE_ERROR(NotPrimitive, ValidationError)
LAMFAM_DEFINE_ERROR(CaseMismatch, ValidationError)
LAMFAM_DEFINE_ERROR(NotMultiplicative, ValidationError)
LAMFAM_DEFINE_ERROR(MissingFrobenius, ValidationError)
LAMFAM_DEFINE_ERROR(ValidationFailed, ValidationError)

#undef LAMFAM_DEFINE_ERROR

/// Raised by the eigenbasis loader when a stored eigenvalue disagrees with
/// the Hecke action on the stored expansion.
class EigenMismatch : public ValidationError {
 public:
  EigenMismatch(long ell, const std::string& expected, const std::string& found)
      : ValidationError("EigenMismatch: a_" + std::to_string(ell) + " expected " + expected +
                        ", found " + found),
        ell_(ell) {}
  long ell() const noexcept { return ell_; }

 private:
  long ell_;
};

}  // namespace lamfam
