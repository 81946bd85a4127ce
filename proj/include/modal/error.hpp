#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modal {

enum class ErrorCode {
  DuplicateVertexName,
  InvalidModeId,
  InvalidPoint,
  NotNormalized,
  UnknownMode,
  InvalidThresholds,
  DuplicateMode,
  ModeNotInNerve,
  MissingScore,
  ScoreOutOfRange,
  InvalidErrorBound,
  TimestampRegression,
  NoSuchTransition,
  GuardViolation,
  InvalidTolerance,
  MalformedInterval,
  InvalidTask,
  InvalidChartCount,
  ConfigInvalid,
  ParseError,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; the C API maps codes to status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modal
