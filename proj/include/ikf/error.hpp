#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ikf {

enum class ErrorCode {
  TooFewSamples,
  StratificationInfeasible,
  InfeasiblePartition,
  InvalidPlan,
  InvalidArgument,
  LengthMismatch,
  LabelOutOfRange,
  EmptyTestSet,
  NotBinary,
  EmptyTrainingSet,
  DimensionMismatch,
  DegenerateClass,
  InsufficientRepetitions,
  MissingReference,
  InvalidSpec,
  ParseError,
  NonNumericFeature,
  MissingLabel,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for the codes that mean "this (n, k, classes) cannot be partitioned".
constexpr bool is_infeasibility(ErrorCode code) noexcept {
  return code == ErrorCode::TooFewSamples || code == ErrorCode::StratificationInfeasible ||
         code == ErrorCode::InfeasiblePartition;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ikf
