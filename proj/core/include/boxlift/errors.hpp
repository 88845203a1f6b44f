#pragma once

#include <stdexcept>
#include <string>

namespace boxlift {

// Failure categories surfaced by the library. Callers (and the CLI's
// diagnostics) switch on the code, so throw sites pick the most specific one
// rather than folding everything into a generic runtime_error.
enum class ErrorCode {
  kInsufficientPoints,
  kNoHorizontalPlane,
  kEmptyInput,
  kShapeMismatch,
  kDomain,
  kEmptyPositiveSet,
  kZeroVector,
  kDegenerateRange,
  kNoGroundTruth,
  kParse,
  kSchema,
  kVersion,
  kIo,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace boxlift
