#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lrlab {

/// Failure categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorCode {
  SupportViolation,
  GridMismatch,
  CflViolation,
  NonfiniteState,
  MaskOutOfRange,
  PreconditionViolation,
  SliceViolation,
  InvalidH,
  NotSpaceLike,
  IllConditioned,
  InsufficientDirections,
  NotClosed,
  OriginInsideSupport,
  EmptyCone,
  DivisionByZero,
  ConfigInvalid,
  AssertionFailed,
  MissingReport,
  InvalidArgument,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::NonfiniteState: return "NonfiniteState";
    case ErrorCode::MaskOutOfRange: return "MaskOutOfRange";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::SliceViolation: return "SliceViolation";
    case ErrorCode::InvalidH: return "InvalidH";
    case ErrorCode::NotSpaceLike: return "NotSpaceLike";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::InsufficientDirections: return "InsufficientDirections";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::OriginInsideSupport: return "OriginInsideSupport";
    case ErrorCode::EmptyCone: return "EmptyCone";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::AssertionFailed: return "AssertionFailed";
    case ErrorCode::MissingReport: return "MissingReport";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace lrlab
