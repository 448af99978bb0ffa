#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcot {

enum class ErrorCode {
  RowSumError,
  NotIrreducible,
  NotReversible,
  NotSquare,
  NegativeInput,
  NotInRange,
  NotStrictlyPositive,
  IllConditioned,
  InvalidArgument,
  StepSizeUnderflow,
  AtEquilibrium,
  InsufficientData,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain error carrying a stable code; the CLI maps codes onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for file and parse failures (exit status 2 in the CLI).
  bool is_io() const noexcept { return code_ == ErrorCode::Io || code_ == ErrorCode::Parse; }

 private:
  ErrorCode code_;
};

}  // namespace mcot
