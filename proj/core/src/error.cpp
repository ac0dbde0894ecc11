#include "mineig/error.hpp"

namespace mineig {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidMatrix: return "InvalidMatrix";
    case ErrorCode::kSingularDirection: return "SingularDirection";
    case ErrorCode::kSingularMatrix: return "SingularMatrix";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kInvalidMatroid: return "InvalidMatroid";
    case ErrorCode::kNothingToRound: return "NothingToRound";
    case ErrorCode::kDependentContraction: return "DependentContraction";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kInfeasibleFace: return "InfeasibleFace";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kInfeasiblePart: return "InfeasiblePart";
    case ErrorCode::kInternalInvariantViolation: return "InternalInvariantViolation";
    case ErrorCode::kLongVectorLeak: return "LongVectorLeak";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kWrongProvenance: return "WrongProvenance";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

ParseError::ParseError(std::string pointer, const std::string& message)
    : Error(ErrorCode::kParseError,
            "at '" + pointer + "': " + message),
      pointer_(std::move(pointer)) {}

}  // namespace mineig
