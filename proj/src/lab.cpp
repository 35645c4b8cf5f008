#include "coherence/lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "coherence/protocols.hpp"

namespace coherence {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

std::size_t Rng::index(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

std::vector<double> random_dirichlet(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - rng.uniform());
    total += x;
  }
  if (total == 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

StateVector random_state_vector(std::size_t d, Rng& rng) {
  std::vector<Complex> v(d);
  for (auto& a : v) a = rng.complex_normal();
  return StateVector::normalized(std::move(v));
}

ComplexMatrix random_unitary(std::size_t d, Rng& rng) {
  std::vector<std::vector<Complex>> cols;
  cols.reserve(d);
  while (cols.size() < d) {
    std::vector<Complex> v(d);
    for (auto& a : v) a = rng.complex_normal();
    for (const auto& q : cols) {
      Complex proj = 0.0;
      for (std::size_t i = 0; i < d; ++i) proj += std::conj(q[i]) * v[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= proj * q[i];
    }
    double norm2 = 0.0;
    for (const auto& a : v) norm2 += std::norm(a);
    if (norm2 < 1e-20) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : v) a *= inv;
    cols.push_back(std::move(v));
  }
  ComplexMatrix u(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) u(i, j) = cols[j][i];
  }
  return u;
}

DensityMatrix random_density(std::size_t d, std::size_t rank, std::uint64_t seed) {
  if (rank == 0 || rank > d) {
    throw CoherenceError(ErrorCode::InvalidRank,
                         "rank " + std::to_string(rank) + " for dimension " + std::to_string(d));
  }
  Rng rng(seed);
  const std::vector<double> weights = random_dirichlet(rank, rng);
  ComplexMatrix rho(d, d);
  for (std::size_t k = 0; k < rank; ++k) {
    const StateVector psi = random_state_vector(d, rng);
    rho += weights[k] * ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
  }
  return DensityMatrix::validate(rho);
}

IncoherentInstrument random_incoherent_instrument(std::size_t d_in, std::size_t n_ops,
                                                  std::uint64_t seed) {
  if (d_in == 0 || n_ops == 0) {
    throw CoherenceError(ErrorCode::InvalidArgument, "instrument needs d_in >= 1 and n_ops >= 1");
  }
  Rng rng(seed);
  std::vector<ComplexMatrix> ops(n_ops, ComplexMatrix(d_in, d_in));

  if (n_ops >= d_in && rng.uniform() < 0.25) {
    // K_n = |r_n><q_n| with q_n the rows of an n_ops x d_in isometry Q:
    // sum_n K_n^dagger K_n = Q^dagger Q = 1.
    const ComplexMatrix u = random_unitary(n_ops, rng);
    for (std::size_t n = 0; n < n_ops; ++n) {
      const std::size_t r = rng.index(d_in);
      for (std::size_t j = 0; j < d_in; ++j) ops[n](r, j) = u(n, j);
    }
    return validate_instrument(std::move(ops));
  }

  // Each operator sends column i to row perm_n[i]; rows are distinct within
  // an operator, so K_n^dagger K_n is diagonal and per-column normalization
  // gives completeness.
  std::vector<std::vector<std::size_t>> perms(n_ops, std::vector<std::size_t>(d_in));
  for (auto& perm : perms) {
    for (std::size_t i = 0; i < d_in; ++i) perm[i] = i;
    for (std::size_t i = d_in; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  }
  for (std::size_t i = 0; i < d_in; ++i) {
    std::vector<Complex> amps(n_ops);
    double norm2 = 0.0;
    for (auto& a : amps) {
      a = rng.uniform() < 0.2 ? Complex{} : rng.complex_normal();
      norm2 += std::norm(a);
    }
    if (norm2 == 0.0) {
      const std::size_t n = rng.index(n_ops);
      amps[n] = rng.complex_normal();
      norm2 = std::norm(amps[n]);
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t n = 0; n < n_ops; ++n) ops[n](perms[n][i], i) = amps[n] * inv;
  }
  return validate_instrument(std::move(ops));
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::C1: return "C1";
    case Condition::C1Prime: return "C1'";
    case Condition::C2a: return "C2a";
    case Condition::C2b: return "C2b";
    case Condition::C2c: return "C2c";
    case Condition::C3: return "C3";
  }
  return "UNKNOWN";
}

std::optional<Condition> parse_condition(std::string_view name) {
  for (Condition c : kAllConditions) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

double faithfulness_floor(MeasureId id, double c) {
  switch (id) {
    case MeasureId::L1:
    case MeasureId::TraceNorm:
      return 2.0 * c;
    case MeasureId::L2:
      return 2.0 * c * c;
    case MeasureId::RelEnt:
      // Pinsker: S(rho||delta) >= ||rho - delta||_tr^2 / (2 ln 2), and every
      // diagonal delta has ||rho - delta||_tr >= 2c.
      return 2.0 * c * c / std::numbers::ln2;
    case MeasureId::Fidelity:
      // 1 - sqrt(F) >= T^2 / 2 with T = ||rho - delta||_tr / 2 >= c.
      return 0.5 * c * c;
  }
  return 0.0;
}

void CampaignConfig::validate() const {
  if (trials < 1) throw CoherenceError(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (dims.empty()) throw CoherenceError(ErrorCode::InvalidArgument, "dims is empty");
  for (std::size_t d : dims) {
    if (d < 2) throw CoherenceError(ErrorCode::InvalidArgument, "dims must all be >= 2");
  }
  if (!(violation_threshold > 0.0)) {
    throw CoherenceError(ErrorCode::InvalidArgument, "violation_threshold must be positive");
  }
  if (max_kraus < 1) throw CoherenceError(ErrorCode::InvalidArgument, "max_kraus must be >= 1");
  if (measures.empty() || conditions.empty()) {
    throw CoherenceError(ErrorCode::InvalidArgument, "measures and conditions must be nonempty");
  }
}

namespace {

struct Valued {
  double value = 0.0;
  double gap = 0.0;  // value may exceed the true measure by at most this
};

Valued evaluate(MeasureId id, const DensityMatrix& rho) {
  const MeasureReport r = measure(id, rho);
  return {r.value, r.optimizer_residual.value_or(0.0)};
}

struct Mixture {
  std::vector<double> weights;
  std::vector<DensityMatrix> states;  // states[0] is rho
};

Mixture draw_mixture(const DensityMatrix& rho, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t extra = 1 + rng.index(3);
  Mixture mix;
  mix.weights = random_dirichlet(extra + 1, rng);
  mix.states.push_back(rho);
  for (std::size_t k = 0; k < extra; ++k) {
    const std::size_t rank = 1 + rng.index(rho.dim());
    mix.states.push_back(random_density(rho.dim(), rank, rng.next()));
  }
  return mix;
}

}  // namespace

std::vector<ConditionReport> check_conditions(MeasureId measure_id, const DensityMatrix& rho,
                                              const IncoherentInstrument& channel,
                                              const CampaignConfig& config,
                                              std::uint64_t mixture_seed) {
  if (channel.input_dim() != rho.dim()) {
    throw CoherenceError(ErrorCode::DimensionMismatch, "instrument and state dimensions differ");
  }
  std::optional<Valued> at_rho;
  auto c_rho = [&]() -> const Valued& {
    if (!at_rho) at_rho = evaluate(measure_id, rho);
    return *at_rho;
  };
  std::optional<std::vector<MeasurementOutcome>> outcomes;
  auto selective = [&]() -> const std::vector<MeasurementOutcome>& {
    if (!outcomes) outcomes = apply_selective(channel, rho);
    return *outcomes;
  };

  std::vector<ConditionReport> reports;
  for (Condition condition : config.conditions) {
    ConditionReport r;
    r.measure = measure_id;
    r.condition = condition;
    try {
      switch (condition) {
        case Condition::C1: {
          const Valued v = evaluate(measure_id, dephase(rho));
          r.lhs = 0.0;
          r.rhs = v.value;
          break;
        }
        case Condition::C1Prime: {
          const double c = max_off_diagonal(rho.matrix());
          if (c > kFaithfulnessGate) {
            r.lhs = c_rho().value;
            r.rhs = faithfulness_floor(measure_id, c);
          } else {
            r.note = "vacuous: max off-diagonal below gate";
          }
          break;
        }
        case Condition::C2a: {
          const Valued v = evaluate(measure_id, apply_channel(channel, rho));
          r.lhs = c_rho().value;
          r.rhs = v.value;
          r.uncertainty = v.gap;
          break;
        }
        case Condition::C2b: {
          r.lhs = c_rho().value;
          for (const auto& o : selective()) {
            if (!o.state) continue;  // null outcomes contribute nothing
            const Valued v = evaluate(measure_id, *o.state);
            r.rhs += o.probability * v.value;
            r.uncertainty += o.probability * v.gap;
          }
          break;
        }
        case Condition::C2c: {
          const Valued v = evaluate(measure_id, flag_embed(selective()));
          r.lhs = c_rho().value;
          r.rhs = v.value;
          r.uncertainty = v.gap;
          break;
        }
        case Condition::C3: {
          const Mixture mix = draw_mixture(rho, mixture_seed);
          ComplexMatrix mixed(rho.dim(), rho.dim());
          for (std::size_t k = 0; k < mix.states.size(); ++k) {
            r.lhs += mix.weights[k] * (k == 0 ? c_rho().value : evaluate(measure_id, mix.states[k]).value);
            mixed += mix.weights[k] * mix.states[k].matrix();
          }
          const Valued v = evaluate(measure_id, DensityMatrix::validate(mixed));
          r.rhs = v.value;
          r.uncertainty = v.gap;
          break;
        }
      }
      r.residual = r.lhs - r.rhs;
      const double threshold = config.violation_threshold;
      if (r.residual >= -threshold) {
        r.verdict = Verdict::Holds;
      } else if (r.residual + r.uncertainty >= -threshold) {
        r.verdict = Verdict::Inconclusive;
        r.note = "violation within optimizer gap";
      } else {
        r.verdict = Verdict::Violated;
        r.witness = Witness{rho, {channel.kraus().begin(), channel.kraus().end()}, mixture_seed};
      }
    } catch (const CoherenceError& e) {
      r.verdict = Verdict::Inconclusive;
      r.note = e.what();
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

const Tally* CampaignReport::tally(MeasureId m, Condition c) const {
  for (const auto& t : totals) {
    if (t.measure == m && t.condition == c) return &t;
  }
  return nullptr;
}

namespace {

struct TrialResult {
  std::vector<ConditionReport> reports;
  std::optional<double> trace_gap;
  std::optional<DensityMatrix> state;
};

bool contains(const std::vector<MeasureId>& v, MeasureId m) {
  return std::find(v.begin(), v.end(), m) != v.end();
}

TrialResult run_trial(const CampaignConfig& config, std::size_t trial) {
  const std::uint64_t trial_seed = derive_seed(config.seed, trial);
  const std::uint64_t mixture_seed = derive_seed(trial_seed, 3);
  const bool inject = trial == 0 && contains(config.measures, MeasureId::L2) &&
                      std::find(config.conditions.begin(), config.conditions.end(),
                                Condition::C2b) != config.conditions.end();

  std::optional<DensityMatrix> rho;
  std::optional<IncoherentInstrument> channel;
  if (inject) {
    const double h = 1.0 / std::sqrt(2.0);
    rho = counterexample_state();
    channel = counterexample_instrument(CounterexampleParams(h, h));
  } else {
    Rng rng(trial_seed);
    const std::size_t d = config.dims[rng.index(config.dims.size())];
    const std::size_t rank = 1 + rng.index(d);
    const std::size_t n_ops = 1 + rng.index(config.max_kraus);
    rho = random_density(d, rank, derive_seed(trial_seed, 1));
    channel = random_incoherent_instrument(d, n_ops, derive_seed(trial_seed, 2));
  }

  TrialResult result;
  for (MeasureId m : config.measures) {
    for (auto& r : check_conditions(m, *rho, *channel, config, mixture_seed)) {
      r.trial = trial;
      result.reports.push_back(std::move(r));
    }
  }
  if (contains(config.measures, MeasureId::TraceNorm)) {
    try {
      const MeasureReport tr = c_trace(*rho);
      result.trace_gap = *tr.dephased_value - tr.value;
      result.state = rho;
    } catch (const CoherenceError&) {
      // counted as unchecked
    }
  }
  return result;
}

}  // namespace

CampaignReport fuzz_campaign(const CampaignConfig& config, std::size_t workers) {
  config.validate();
  std::vector<TrialResult> results(config.trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) results[t] = run_trial(config, t);
  };
  workers = std::clamp<std::size_t>(workers, 1, config.trials);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  CampaignReport report;
  report.config = config;
  for (MeasureId m : config.measures) {
    for (Condition c : config.conditions) report.totals.push_back({m, c});
  }
  if (contains(config.measures, MeasureId::TraceNorm)) report.trace_gap = TraceGapObservation{};

  for (auto& trial : results) {
    for (auto& r : trial.reports) {
      Tally* tally = nullptr;
      for (auto& t : report.totals) {
        if (t.measure == r.measure && t.condition == r.condition) tally = &t;
      }
      switch (r.verdict) {
        case Verdict::Holds: ++tally->holds; break;
        case Verdict::Violated:
          ++tally->violated;
          report.violations.push_back(std::move(r));
          break;
        case Verdict::Inconclusive:
          ++tally->inconclusive;
          report.inconclusive.push_back(std::move(r));
          break;
      }
    }
    if (report.trace_gap && trial.trace_gap) {
      auto& obs = *report.trace_gap;
      ++obs.states_checked;
      if (*trial.trace_gap > 1e-6) ++obs.strict_gap_count;
      if (*trial.trace_gap > obs.max_gap) {
        obs.max_gap = *trial.trace_gap;
        obs.max_gap_state = trial.state;
      }
    }
  }
  return report;
}

}  // namespace coherence
