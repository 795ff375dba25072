#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ahmass {

enum class ErrorCode {
  InvalidPoint,
  DimensionMismatch,
  UnsupportedDimension,
  NotTimelikeFuture,
  WallMismatch,
  StepTooLargeNearBoundary,
  RadiusInsideCore,
  NonConvergentSeries,
  NonIntegrableScalarCurvature,
  BadParams,
  SplineDomain,
  NonMonotone,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NotTimelikeFuture: return "NotTimelikeFuture";
    case ErrorCode::WallMismatch: return "WallMismatch";
    case ErrorCode::StepTooLargeNearBoundary: return "StepTooLargeNearBoundary";
    case ErrorCode::RadiusInsideCore: return "RadiusInsideCore";
    case ErrorCode::NonConvergentSeries: return "NonConvergentSeries";
    case ErrorCode::NonIntegrableScalarCurvature: return "NonIntegrableScalarCurvature";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::SplineDomain: return "SplineDomain";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ahmass
