#pragma once

// Randomized monotonicity laboratory. Every generator is a deterministic
// function of its seed; campaign trials derive their own streams from the
// master seed and trial index, so reports do not depend on scheduling.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "coherence/channels.hpp"
#include "coherence/measures.hpp"
#include "coherence/states.hpp"

namespace coherence {

/// mt19937_64 with portable uniform/normal transforms (the std distributions
/// are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// [0, 1)
  double uniform();
  double normal();
  Complex complex_normal();
  /// Uniform in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Independent stream seed for (master, stream) via SplitMix64 mixing.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

std::vector<double> random_dirichlet(std::size_t n, Rng& rng);
StateVector random_state_vector(std::size_t d, Rng& rng);
/// Haar-distributed unitary (Gram-Schmidt on a complex Ginibre matrix).
ComplexMatrix random_unitary(std::size_t d, Rng& rng);

/// Mixture of `rank` Haar-random pure states with Dirichlet-uniform weights.
/// Throws InvalidRank unless 1 <= rank <= d.
DensityMatrix random_density(std::size_t d, std::size_t rank, std::uint64_t seed);

/// Random instrument that is incoherent and exactly complete by construction.
/// Two families: per-operator row injections with amplitudes normalized per
/// input column, and (when n_ops >= d_in) measure-and-prepare operators
/// |r_n><q_n| built from the rows q_n of a random isometry.
IncoherentInstrument random_incoherent_instrument(std::size_t d_in, std::size_t n_ops,
                                                  std::uint64_t seed);

enum class Condition { C1, C1Prime, C2a, C2b, C2c, C3 };

inline constexpr std::array<Condition, 6> kAllConditions = {
    Condition::C1, Condition::C1Prime, Condition::C2a,
    Condition::C2b, Condition::C2c, Condition::C3};

/// C1, C1', C2a, C2b, C2c, C3
std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view name);

enum class Verdict { Holds, Violated, Inconclusive };
std::string_view to_string(Verdict v);

/// Off-diagonal magnitude above which (C1') demands a strictly positive value.
inline constexpr double kFaithfulnessGate = 1e-3;
/// Provable lower bound on C(rho) when rho has an off-diagonal entry of
/// magnitude c.
double faithfulness_floor(MeasureId id, double c);

struct CampaignConfig {
  std::vector<std::size_t> dims{2, 3, 4};
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<MeasureId> measures{kAllMeasures.begin(), kAllMeasures.end()};
  std::vector<Condition> conditions{kAllConditions.begin(), kAllConditions.end()};
  double violation_threshold = 1e-8;
  /// Instruments get between 1 and max_kraus operators.
  std::size_t max_kraus = 3;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct Witness {
  DensityMatrix state;
  std::vector<ComplexMatrix> kraus;
  std::uint64_t mixture_seed = 0;
};

/// One condition for one (state, instrument, measure) triple. The condition
/// asserts lhs >= rhs; residual = lhs - rhs.
struct ConditionReport {
  MeasureId measure = MeasureId::RelEnt;
  Condition condition = Condition::C1;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  /// Optimizer gap by which rhs may overstate its true value.
  double uncertainty = 0.0;
  Verdict verdict = Verdict::Holds;
  std::string note;
  std::optional<Witness> witness;  // present iff verdict == Violated
  std::size_t trial = 0;
};

std::vector<ConditionReport> check_conditions(MeasureId measure, const DensityMatrix& rho,
                                              const IncoherentInstrument& channel,
                                              const CampaignConfig& config,
                                              std::uint64_t mixture_seed);

struct Tally {
  MeasureId measure;
  Condition condition;
  std::size_t holds = 0;
  std::size_t violated = 0;
  std::size_t inconclusive = 0;
};

struct TraceGapObservation {
  std::size_t states_checked = 0;
  /// States with min_delta ||rho - delta||_tr below ||rho - rho_diag||_tr by more
  /// than 1e-6.
  std::size_t strict_gap_count = 0;
  double max_gap = 0.0;
  std::optional<DensityMatrix> max_gap_state;
};

struct CampaignReport {
  CampaignConfig config;
  std::vector<Tally> totals;  // config.measures x config.conditions, in config order
  std::vector<ConditionReport> violations;
  std::vector<ConditionReport> inconclusive;
  std::optional<TraceGapObservation> trace_gap;  // when TRACE_NORM is measured

  const Tally* tally(MeasureId m, Condition c) const;
};

/// Runs config.trials trials on `workers` threads. Trial 0 is the l2
/// counterexample pair whenever L2 and C2b are both requested.
CampaignReport fuzz_campaign(const CampaignConfig& config, std::size_t workers = 1);

}  // namespace coherence
