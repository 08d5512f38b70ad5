#pragma once

#include <stdexcept>
#include <string>

namespace dpmimo {

enum class ErrorCode {
  kNotHermitian,
  kNotPsd,
  kSingular,
  kDimensionMismatch,
  kGeometryInfeasible,
  kNonPositiveDistance,
  kInsufficientSamples,
  kPilotBudgetExceeded,
  kDegenerateEstimateStatistics,
  kRankDeficient,
  kTooManyUes,
  kDegenerateTrace,
  kIndefiniteEffectiveNoise,
  kInvalidConfig,
};

const char* to_string(ErrorCode code);

/// Exception carrying one of the library's error categories.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dpmimo
