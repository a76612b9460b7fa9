// bat/src/error.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/error.h"

namespace bat {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic:
      return "BadMagic";
    case ErrorCode::kBadDims:
      return "BadDims";
    case ErrorCode::kTruncatedPayload:
      return "TruncatedPayload";
    case ErrorCode::kDimMismatch:
      return "DimMismatch";
    case ErrorCode::kInvalidWindow:
      return "InvalidWindow";
    case ErrorCode::kTooLarge:
      return "TooLarge";
    case ErrorCode::kDegenerateWeights:
      return "DegenerateWeights";
    case ErrorCode::kFireCountMismatch:
      return "FireCountMismatch";
    case ErrorCode::kBandInfeasible:
      return "BandInfeasible";
    case ErrorCode::kEmptySet:
      return "EmptySet";
    case ErrorCode::kInvalidInput:
      return "InvalidInput";
    case ErrorCode::kIo:
      return "Io";
  }
  return "Unknown";
}

void Throw(ErrorCode code, const std::string &what) { throw Error(code, what); }

}  // namespace bat
