#include "ikf/error.hpp"

namespace ikf {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::StratificationInfeasible: return "StratificationInfeasible";
    case ErrorCode::InfeasiblePartition: return "InfeasiblePartition";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::NotBinary: return "NotBinary";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DegenerateClass: return "DegenerateClass";
    case ErrorCode::InsufficientRepetitions: return "InsufficientRepetitions";
    case ErrorCode::MissingReference: return "MissingReference";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonNumericFeature: return "NonNumericFeature";
    case ErrorCode::MissingLabel: return "MissingLabel";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ikf
