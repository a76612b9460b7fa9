// bat/include/bat/error.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_ERROR_H_
#define BAT_ERROR_H_

#include <stdexcept>
#include <string>

namespace bat {

enum class ErrorCode {
  kBadMagic,
  kBadDims,
  kTruncatedPayload,
  kDimMismatch,
  kInvalidWindow,
  kTooLarge,
  kDegenerateWeights,
  kFireCountMismatch,
  kBandInfeasible,
  kEmptySet,
  kInvalidInput,
  kIo,
};

const char *ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type; `code()`
// lets callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Throw(ErrorCode code, const std::string &what);

}  // namespace bat

#endif  // BAT_ERROR_H_
