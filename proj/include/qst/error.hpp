#pragma once

#include <stdexcept>
#include <string>

namespace qst {

enum class ErrorCode {
  InvalidLength,
  NonPositivePerturbation,
  NonHalfIntegerFilling,
  InvalidArgument,
  ConvergenceFailure,
  IndexOutOfRange,
  UnorderedPair,
  LocalizationNotFound,
  SextetMismatch,
  SetupArityMismatch,
  SizeCapExceeded,
  DegenerateSamples,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerics rather than of the input.
  bool is_numerical() const noexcept {
    return code_ == ErrorCode::ConvergenceFailure || code_ == ErrorCode::SextetMismatch ||
           code_ == ErrorCode::LocalizationNotFound;
  }

 private:
  ErrorCode code_;
};

}  // namespace qst
