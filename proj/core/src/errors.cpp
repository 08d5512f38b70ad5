#include "dpmimo/errors.hpp"

namespace dpmimo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNotPsd: return "NotPSD";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kGeometryInfeasible: return "GeometryInfeasible";
    case ErrorCode::kNonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kPilotBudgetExceeded: return "PilotBudgetExceeded";
    case ErrorCode::kDegenerateEstimateStatistics: return "DegenerateEstimateStatistics";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kTooManyUes: return "TooManyUEs";
    case ErrorCode::kDegenerateTrace: return "DegenerateTrace";
    case ErrorCode::kIndefiniteEffectiveNoise: return "IndefiniteEffectiveNoise";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace dpmimo
