#include "coherence/error.hpp"

#include <algorithm>

namespace coherence {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotUnitTrace: return "NotUnitTrace";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::IncompleteInstrument: return "IncompleteInstrument";
    case ErrorCode::CoherenceGenerating: return "CoherenceGenerating";
    case ErrorCode::MixedOutputDims: return "MixedOutputDims";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::InvalidRank: return "InvalidRank";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::SupportTooSmall: return "SupportTooSmall";
    case ErrorCode::ZeroOverlapDegenerate: return "ZeroOverlapDegenerate";
    case ErrorCode::OptimizerDidNotConverge: return "OptimizerDidNotConverge";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.code));
    if (!v.detail.empty()) out += " (" + v.detail + ")";
  }
  return out;
}

ErrorCode first_code(const std::vector<Violation>& violations) {
  return violations.empty() ? ErrorCode::InvalidArgument : violations.front().code;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : CoherenceError(first_code(violations), summarize(violations)),
      violations_(std::move(violations)) {}

bool ValidationError::has(ErrorCode code) const noexcept {
  return std::any_of(violations_.begin(), violations_.end(),
                     [code](const Violation& v) { return v.code == code; });
}

}  // namespace coherence
