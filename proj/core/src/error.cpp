// Copyright 2026 The dishlog Authors
// SPDX-License-Identifier: Apache-2.0

#include "dishlog/error.hpp"

namespace dishlog {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyRegistry: return "EmptyRegistry";
    case ErrorCode::kDuplicateClass: return "DuplicateClass";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::kBoxOutOfRange: return "BoxOutOfRange";
    case ErrorCode::kConfidenceOutOfRange: return "ConfidenceOutOfRange";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNoEvaluableClasses: return "NoEvaluableClasses";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kMissingDishCalories: return "MissingDishCalories";
    case ErrorCode::kInvalidProfile: return "InvalidProfile";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kEmptyMeal: return "EmptyMeal";
    case ErrorCode::kNoGoal: return "NoGoal";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, std::size_t line) {
  std::string out(to_string(code));
  if (line != 0) out += " (line " + std::to_string(line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::size_t line)
    : std::runtime_error(decorate(code, message, line)), code_(code), message_(message), line_(line) {}

}  // namespace dishlog
