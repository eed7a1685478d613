// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dishlog {

enum class ErrorCode {
  kEmptyRegistry,
  kDuplicateClass,
  kFormat,
  kClassOutOfRange,
  kBoxOutOfRange,
  kConfidenceOutOfRange,
  kInvalidArgument,
  kNoEvaluableClasses,
  kLengthMismatch,
  kMissingDishCalories,
  kInvalidProfile,
  kUnknownUser,
  kEmptyMeal,
  kNoGoal,
  kInvalidRange,
  kIo,
};

/// Stable machine-readable name, e.g. "BoxOutOfRange".
std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. Parse errors carry the
/// 1-based line number of the offending input line; `line() == 0` means the
/// error is not tied to a line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t line = 0);

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  /// The message without the code/line decoration of what().
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::size_t line_;
};

}  // namespace dishlog
