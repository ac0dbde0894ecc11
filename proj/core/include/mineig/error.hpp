#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mineig {

enum class ErrorCode {
  kInvalidMatrix,
  kSingularDirection,
  kSingularMatrix,
  kNotPositiveDefinite,
  kInvalidMatroid,
  kNothingToRound,
  kDependentContraction,
  kRankDeficient,
  kInfeasibleFace,
  kNotConverged,
  kInfeasiblePart,
  kInternalInvariantViolation,
  kLongVectorLeak,
  kInfeasible,
  kTooLarge,
  kWrongProvenance,
  kParseError,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this exception type; `code()`
// identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Schema violation in an input document. `pointer()` is a JSON pointer
// (RFC 6901) to the offending value, e.g. "/matroid/parts".
class ParseError : public Error {
 public:
  ParseError(std::string pointer, const std::string& message);

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace mineig
