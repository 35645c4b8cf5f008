#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coherence {

enum class ErrorCode {
  NotSquare,
  NotHermitian,
  NotUnitTrace,
  NotPSD,
  NonFinite,
  DimensionMismatch,
  NoConvergence,
  IncompleteInstrument,
  CoherenceGenerating,
  MixedOutputDims,
  InvalidDimension,
  InvalidRank,
  InvalidSpec,
  InvalidArgument,
  NotUnitary,
  SupportTooSmall,
  ZeroOverlapDegenerate,
  OptimizerDidNotConverge,
  ParseError,
};

std::string_view to_string(ErrorCode code);

// Offending column of a Kraus operator that maps a basis state to a
// superposition.
struct CoherenceWitness {
  std::size_t operator_index = 0;
  std::size_t column = 0;
  std::size_t row_a = 0;
  std::size_t row_b = 0;
};

struct Violation {
  Violation(ErrorCode c, double r, std::string d, std::optional<CoherenceWitness> w = std::nullopt)
      : code(c), residual(r), detail(std::move(d)), witness(w) {}

  ErrorCode code;
  double residual = 0.0;
  std::string detail;
  std::optional<CoherenceWitness> witness;
};

class CoherenceError : public std::runtime_error {
 public:
  CoherenceError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the validators. Lists every invariant that failed, not just the
// first one.
class ValidationError : public CoherenceError {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(ErrorCode code) const noexcept;

 private:
  std::vector<Violation> violations_;
};

}  // namespace coherence
