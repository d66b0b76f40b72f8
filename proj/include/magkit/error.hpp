#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace magkit {

enum class ErrorCode {
  // input errors
  NotSquare,
  NonFinite,
  AsymmetricInput,
  NegativeDistance,
  ZeroOffDiagonal,
  NonzeroDiagonal,
  TriangleViolation,
  DuplicatePoint,
  DimensionMismatch,
  EmptyInput,
  NonpositiveScale,
  EmptySubset,
  IndexOutOfRange,
  InvalidGrid,
  ParseError,
  UnknownTarget,
  // mathematical nonexistence / failed hypotheses
  NoSolution,
  NotPositiveDefinite,
  DegenerateSimplex,
  SingularZ,
  ZeroMagnitude,
  SingularPivotBlock,
  LastPoint,
  ThresholdNotFound,
  TooManyPoints,
  DegenerateRemainder,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::AsymmetricInput: return "AsymmetricInput";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::DuplicatePoint: return "DuplicatePoint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownTarget: return "UnknownTarget";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::SingularZ: return "SingularZ";
    case ErrorCode::ZeroMagnitude: return "ZeroMagnitude";
    case ErrorCode::SingularPivotBlock: return "SingularPivotBlock";
    case ErrorCode::LastPoint: return "LastPoint";
    case ErrorCode::ThresholdNotFound: return "ThresholdNotFound";
    case ErrorCode::TooManyPoints: return "TooManyPoints";
    case ErrorCode::DegenerateRemainder: return "DegenerateRemainder";
  }
  return "Unknown";
}

/// True for errors caused by malformed or invalid input rather than by the
/// mathematics (nonexistent magnitude, failed positive definiteness, ...).
constexpr bool is_input_error(ErrorCode code) {
  return code <= ErrorCode::UnknownTarget;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace magkit
