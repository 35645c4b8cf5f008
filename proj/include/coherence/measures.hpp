#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "coherence/error.hpp"
#include "coherence/states.hpp"

namespace coherence {

enum class MeasureId { RelEnt, L1, L2, Fidelity, TraceNorm };

inline constexpr std::array<MeasureId, 5> kAllMeasures = {
    MeasureId::RelEnt, MeasureId::L1, MeasureId::L2, MeasureId::Fidelity, MeasureId::TraceNorm};

/// REL_ENT, L1, L2, FIDELITY, TRACE_NORM
std::string_view to_string(MeasureId id);
std::optional<MeasureId> parse_measure(std::string_view name);

struct MeasureReport {
  MeasureId measure = MeasureId::RelEnt;
  double value = 0.0;
  /// Closest incoherent state, when the measure is a minimum over I.
  std::optional<IncoherentState> minimizer;
  /// Certified upper bound on value - true minimum (optimizer-backed measures).
  std::optional<double> optimizer_residual;
  std::optional<int> iterations;
  /// FIDELITY and TRACE_NORM: the distance to rho_diag, which can exceed the minimum.
  std::optional<double> dephased_value;
  /// Set for L2, which is not monotone under selective incoherent operations.
  bool not_a_monotone = false;
};

// Distance-based measures --------------------------------------------------

enum class DistanceObjective {
  Fidelity,  // 1 - sqrt(F(rho, delta))
  Trace,     // ||rho - delta||_tr
};

/// Eigenvalues of rho at or below this are dropped when evaluating fidelities,
/// so roundoff-level eigenvalues do not contribute O(sqrt(eps)) noise.
inline constexpr double kFidelitySupportThreshold = 1e-14;

/// G with G G^dagger = rho over the eigenvalues above kFidelitySupportThreshold.
/// The nonzero spectrum of sqrt(rho) sigma sqrt(rho) is that of G^dagger sigma G.
ComplexMatrix fidelity_factor(const ComplexMatrix& rho);

/// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

struct OptimizerOptions {
  int max_iterations = 10000;
  /// Stop once the certified optimality gap is below this.
  double target_gap = 1e-12;
  /// Gap that still counts as converged when the budget runs out.
  double accept_gap = 1e-6;
};

struct OptimizationResult {
  IncoherentState minimizer;
  double value = 0.0;
  /// best value - certified lower bound on the minimum
  double gap = 0.0;
  int iterations = 0;
};

/// Carries the best iterate when the budget runs out above accept_gap.
class OptimizerError : public CoherenceError {
 public:
  explicit OptimizerError(OptimizationResult best);
  const OptimizationResult& best() const noexcept { return best_; }

 private:
  OptimizationResult best_;
};

/// min over incoherent delta of the objective. Both objectives are convex in
/// delta, so the ellipsoid method over the probability simplex yields the
/// global minimum together with a certified gap. Never returns a value above
/// the objective at dephase(rho).
OptimizationResult minimize_over_incoherent(const DensityMatrix& rho, DistanceObjective objective,
                                            const OptimizerOptions& options = {});

// Measures -------------------------------------------------------------------

MeasureReport c_rel_ent(const DensityMatrix& rho);
MeasureReport c_l1(const DensityMatrix& rho);
MeasureReport c_l2(const DensityMatrix& rho);
MeasureReport c_fidelity(const DensityMatrix& rho, const OptimizerOptions& options = {});
MeasureReport c_trace(const DensityMatrix& rho, const OptimizerOptions& options = {});

MeasureReport measure(MeasureId id, const DensityMatrix& rho, const OptimizerOptions& options = {});

}  // namespace coherence
