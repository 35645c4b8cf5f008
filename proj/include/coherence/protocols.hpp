#pragma once

// Constructions built from incoherent operations: preparing any state from the
// maximally coherent state, realizing qubit gates by consuming |Psi_2>,
// probabilistic pure-state conversion, and the counterexample showing that the
// squared l2 distance is not a coherence monotone.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "coherence/channels.hpp"
#include "coherence/states.hpp"

namespace coherence {

/// (1, ..., 1) / sqrt(d). Throws InvalidDimension for d = 0.
StateVector max_coherent_state(std::size_t d);

/// Cyclic index in [1, d]: mod(x - 1, d) + 1. Throws InvalidDimension for d = 0.
std::int64_t mod_shift(std::int64_t x, std::int64_t d);

struct EnsembleMember {
  double weight;
  StateVector state;
};

/// Target sum_l q_l |phi_l><phi_l| of the preparation protocol.
class DistillationSpec {
 public:
  /// Throws InvalidSpec unless weights form a probability vector (1e-9) and
  /// every state has dimension `dim`.
  DistillationSpec(std::size_t dim, std::vector<EnsembleMember> ensemble);
  /// Eigen-ensemble of rho (eigenvalues above 1e-12).
  static DistillationSpec from_density(const DensityMatrix& rho);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<EnsembleMember>& ensemble() const noexcept { return ensemble_; }
  DensityMatrix target() const;

 private:
  std::size_t dim_;
  std::vector<EnsembleMember> ensemble_;
};

/// Kraus operators sqrt(q_l) sum_i c_i^(l) |i><m_{i+n-1}|, ordered by member
/// then by n. Outcome n of member l yields |phi_l> with probability q_l / d
/// when applied to |Psi_d>.
IncoherentInstrument distillation_instrument(const DistillationSpec& spec);

/// Two Kraus operators on qubit (x) ancilla, basis index 2k + l for |k l>.
/// Applied to |phi> (x) |Psi_2> each outcome leaves U|phi> on the first qubit
/// with probability 1/2. Throws DimensionMismatch unless U is 2x2 and
/// NotUnitary unless U^dagger U = 1 within 1e-9.
IncoherentInstrument gate_instrument(const ComplexMatrix& u);
/// |phi> (x) |Psi_2>
StateVector gate_input(const StateVector& phi);

struct ConversionPlan {
  StateVector source;
  StateVector target;
  IncoherentInstrument instrument;
  /// Outcome that leaves the system in |target>.
  std::size_t success_index = 0;
  double p1 = 0.0;
  /// (P psi)_k = psi[perm[k]]; identity when psi has full support.
  std::vector<std::size_t> source_permutation;
  std::vector<std::size_t> target_permutation;
  std::size_t source_support = 0;
  std::size_t target_support = 0;
};

/// Amplitudes at or below this magnitude are outside the support.
inline constexpr double kSupportTolerance = 1e-12;

/// Probabilistic |psi> -> |phi> conversion with success probability
/// 1 / sum_{psi_l != 0} |phi_l / psi_l|^2 after sorting both by magnitude.
/// Throws DimensionMismatch, SupportTooSmall when psi has fewer nonzero
/// amplitudes than phi, ZeroOverlapDegenerate if phi vanishes on the aligned
/// support.
ConversionPlan conversion_instrument(const StateVector& source, const StateVector& target);

struct CounterexampleParams {
  Complex alpha;
  Complex beta;

  /// Throws InvalidArgument unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
  CounterexampleParams(Complex a, Complex b);
  /// alpha = sqrt(1 - beta2), beta = sqrt(beta2).
  static CounterexampleParams from_beta2(double beta2);
};

/// (|psi_1><psi_1| + |psi_2><psi_2|) / 2 with psi_1 = |1>, psi_2 = (|0> + |2>)/sqrt(2).
DensityMatrix counterexample_state();
/// K1 = |0><1| + alpha |2><2|, K2 = |0><0| + beta |1><2|
IncoherentInstrument counterexample_instrument(const CounterexampleParams& params);

struct CounterexampleResult {
  double c_l2_state = 0.0;           // C_l2(rho)
  double average_after = 0.0;        // sum_k p_k C_l2(rho_k), simulated
  double average_closed_form = 0.0;  // |beta|^2 / (2 (1 + |beta|^2))
  std::vector<double> probabilities;
  double residual = 0.0;             // c_l2_state - average_after
  bool violated = false;             // residual < -threshold
};

CounterexampleResult l2_counterexample(const CounterexampleParams& params,
                                       double threshold = 1e-8);

}  // namespace coherence
