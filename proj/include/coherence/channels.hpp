#pragma once

// Incoherent instruments: Kraus lists that map every incoherent state to an
// incoherent state in each outcome, applied either non-selectively (class A,
// outcomes forgotten) or selectively (class B, outcomes recorded).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "coherence/error.hpp"
#include "coherence/linalg.hpp"
#include "coherence/states.hpp"

namespace coherence {

/// Magnitude above which a Kraus entry counts as nonzero.
inline constexpr double kIncoherenceTolerance = 1e-10;
inline constexpr double kCompletenessTolerance = 1e-9;
/// Outcomes at or below this probability carry no post-measurement state.
inline constexpr double kNullOutcomeProbability = 1e-12;

enum class InstrumentMode { NonSelective, Selective };  // classes (A) and (B)

/// Diagnostics of the two instrument invariants, computed without throwing.
struct InstrumentCheck {
  /// sum_n K_n^dagger K_n - 1
  ComplexMatrix completeness_residual;
  double completeness_max = 0.0;
  /// Column-sparsity certificate failures.
  std::vector<CoherenceWitness> coherence_witnesses;
  /// Same question answered by testing K|i><i|K^dagger for diagonality.
  bool direct_check_incoherent = true;

  bool complete() const { return completeness_max <= kCompletenessTolerance; }
  bool incoherent() const { return coherence_witnesses.empty() && direct_check_incoherent; }
};

/// Throws DimensionMismatch when the operators do not share an input dimension.
InstrumentCheck check_instrument(std::span<const ComplexMatrix> ops);

/// True iff every column has at most one entry above `tol`. Equivalent to
/// K|i><i|K^dagger being diagonal for each basis state, hence (by convexity)
/// to K I K^dagger being contained in I.
bool has_incoherent_columns(const ComplexMatrix& k, double tol = kIncoherenceTolerance);
/// Tests K|i><i|K^dagger for off-diagonal entries above tol^2.
bool maps_basis_states_to_diagonal(const ComplexMatrix& k, double tol = kIncoherenceTolerance);

class IncoherentInstrument {
 public:
  std::span<const ComplexMatrix> kraus() const noexcept { return kraus_; }
  std::size_t size() const noexcept { return kraus_.size(); }
  std::size_t input_dim() const noexcept { return kraus_.front().cols(); }
  /// Output dimension when uniform across operators.
  std::optional<std::size_t> uniform_output_dim() const;
  InstrumentMode mode() const noexcept { return mode_; }

 private:
  friend IncoherentInstrument validate_instrument(std::vector<ComplexMatrix>, InstrumentMode);
  IncoherentInstrument(std::vector<ComplexMatrix> kraus, InstrumentMode mode)
      : kraus_(std::move(kraus)), mode_(mode) {}

  std::vector<ComplexMatrix> kraus_;
  InstrumentMode mode_;
};

/// Throws ValidationError with IncompleteInstrument and/or CoherenceGenerating
/// violations (plus MixedOutputDims for ragged outputs in class A);
/// DimensionMismatch for mismatched input dimensions.
IncoherentInstrument validate_instrument(std::vector<ComplexMatrix> ops,
                                         InstrumentMode mode = InstrumentMode::NonSelective);

struct MeasurementOutcome {
  double probability = 0.0;
  /// Absent for null outcomes.
  std::optional<DensityMatrix> state;
};

/// sum_n K_n rho K_n^dagger. Throws DimensionMismatch or MixedOutputDims.
DensityMatrix apply_channel(const IncoherentInstrument& channel, const DensityMatrix& rho);

/// One outcome per Kraus operator, in Kraus order.
std::vector<MeasurementOutcome> apply_selective(const IncoherentInstrument& channel,
                                                const DensityMatrix& rho);

/// sum_i p_i |i><i| (x) rho_i; null outcomes contribute a zero block.
DensityMatrix flag_embed(std::span<const MeasurementOutcome> outcomes);

}  // namespace coherence
