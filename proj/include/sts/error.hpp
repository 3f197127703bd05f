#pragma once

#include <stdexcept>
#include <string>

namespace sts {

// Stable error taxonomy shared by the C++ core, the C API and the CLI.
// CLI exit codes: 0 ok, 1 config, 2 pe-sampling, 3 divergence, 4 verification.
enum class ErrorCode {
  Config = 1,
  PeSamplingFailed = 2,
  Divergence = 3,
  VerifyFailed = 4,
  NumericalInput = 5,
  Shape = 6,
  IllConditionedGram = 7,
  InvalidSubsetEncoding = 8,
  NotApplicable = 9,
  Io = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sts
