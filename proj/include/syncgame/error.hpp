#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace syncgame {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NotHermitian,
  NotProjection,
  NotUnitary,
  RankOutOfRange,
  ParseError,
  LoopEdge,
  InvalidGame,
  InvalidPVM,
  InvalidCorrelation,
  MarginalInconsistent,
  ShapeMismatch,
  TooLarge,
  DegenerateAngle,
  SumExceedsIdentity,
  InvariantViolation,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotProjection: return "NotProjection";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::RankOutOfRange: return "RankOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LoopEdge: return "LoopEdge";
    case ErrorCode::InvalidGame: return "InvalidGame";
    case ErrorCode::InvalidPVM: return "InvalidPVM";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
    case ErrorCode::MarginalInconsistent: return "MarginalInconsistent";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::DegenerateAngle: return "DegenerateAngle";
    case ErrorCode::SumExceedsIdentity: return "SumExceedsIdentity";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

/// Single exception type for the library; the code tells callers (and the
/// CLI exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Error(ErrorCode code, const std::string& what, std::size_t line)
      : std::runtime_error(std::string(to_string(code)) + " (line " + std::to_string(line) +
                           "): " + what),
        code_(code),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace syncgame
