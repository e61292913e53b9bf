#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oqho {

enum class ErrorCode {
  // input validation
  DimensionMismatch,
  SingularCcr,
  NotAntisymmetric,
  NotSymmetric,
  InvalidArgument,
  NegativeTime,
  NegativeTheta,
  UnsortedTimes,
  InvalidInitialState,
  OrderTooLarge,
  GridTooLarge,
  DimensionTooLarge,
  ThetaOutOfRange,
  EpsilonTooSmall,
  InsufficientPaths,
  ConfigParse,
  ModelInvalid,
  // numerical
  EigenFailure,
  Overflow,
  NotHurwitz,
  IllConditioned,
  NotPsd,
  NoConvergence,
  MissingTailBound,
  LinearSolveFailure,
  DefectiveAndUnstableShift,
  StepperConstructionFailure,
  VarianceBlowup,
  NumericalFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

// Numerical failures (as opposed to bad input) map to exit code 3 in the CLI.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularCcr: return "SingularCcr";
    case ErrorCode::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::NegativeTheta: return "NegativeTheta";
    case ErrorCode::UnsortedTimes: return "UnsortedTimes";
    case ErrorCode::InvalidInitialState: return "InvalidInitialState";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::EpsilonTooSmall: return "EpsilonTooSmall";
    case ErrorCode::InsufficientPaths: return "InsufficientPaths";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::ModelInvalid: return "ModelInvalid";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::MissingTailBound: return "MissingTailBound";
    case ErrorCode::LinearSolveFailure: return "LinearSolveFailure";
    case ErrorCode::DefectiveAndUnstableShift: return "DefectiveAndUnstableShift";
    case ErrorCode::StepperConstructionFailure: return "StepperConstructionFailure";
    case ErrorCode::VarianceBlowup: return "VarianceBlowup";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

inline bool is_numerical(ErrorCode code) noexcept {
  return static_cast<int>(code) >= static_cast<int>(ErrorCode::EigenFailure);
}

}  // namespace oqho
