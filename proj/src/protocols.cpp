#include "coherence/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "coherence/measures.hpp"

namespace coherence {

StateVector max_coherent_state(std::size_t d) {
  if (d == 0) throw CoherenceError(ErrorCode::InvalidDimension, "dimension must be positive");
  return StateVector(std::vector<Complex>(d, Complex(1.0 / std::sqrt(static_cast<double>(d)))));
}

std::int64_t mod_shift(std::int64_t x, std::int64_t d) {
  if (d <= 0) throw CoherenceError(ErrorCode::InvalidDimension, "modulus must be positive");
  const std::int64_t r = (x - 1) % d;
  return (r < 0 ? r + d : r) + 1;
}

DistillationSpec::DistillationSpec(std::size_t dim, std::vector<EnsembleMember> ensemble)
    : dim_(dim), ensemble_(std::move(ensemble)) {
  if (dim_ == 0 || ensemble_.empty()) {
    throw CoherenceError(ErrorCode::InvalidSpec, "empty distillation target");
  }
  double total = 0.0;
  for (const auto& m : ensemble_) {
    if (m.state.dim() != dim_) {
      throw CoherenceError(ErrorCode::InvalidSpec,
                           "ensemble state of dimension " + std::to_string(m.state.dim()) +
                               " in a dimension-" + std::to_string(dim_) + " target");
    }
    if (!(m.weight >= 0.0)) throw CoherenceError(ErrorCode::InvalidSpec, "negative weight");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw CoherenceError(ErrorCode::InvalidSpec, "weights sum to " + std::to_string(total));
  }
}

DistillationSpec DistillationSpec::from_density(const DensityMatrix& rho) {
  const Spectrum s = eig_hermitian(rho.matrix());
  std::vector<EnsembleMember> members;
  double total = 0.0;
  for (std::size_t k = 0; k < rho.dim(); ++k) {
    if (s.eigenvalues[k] <= kEntropyZeroThreshold) continue;
    members.push_back({s.eigenvalues[k], StateVector::normalized(s.eigenvectors.column(k))});
    total += s.eigenvalues[k];
  }
  for (auto& m : members) m.weight /= total;
  return DistillationSpec(rho.dim(), std::move(members));
}

DensityMatrix DistillationSpec::target() const {
  ComplexMatrix out(dim_, dim_);
  for (const auto& m : ensemble_) {
    out += m.weight * ComplexMatrix::outer(m.state.amplitudes(), m.state.amplitudes());
  }
  return DensityMatrix::validate(out);
}

IncoherentInstrument distillation_instrument(const DistillationSpec& spec) {
  const std::size_t d = spec.dim();
  std::vector<ComplexMatrix> ops;
  ops.reserve(spec.ensemble().size() * d);
  for (const auto& member : spec.ensemble()) {
    const double amp = std::sqrt(member.weight);
    for (std::size_t n = 1; n <= d; ++n) {
      ComplexMatrix k(d, d);
      for (std::size_t i = 1; i <= d; ++i) {
        const auto col = mod_shift(static_cast<std::int64_t>(i + n - 1), static_cast<std::int64_t>(d));
        k(i - 1, static_cast<std::size_t>(col - 1)) = amp * member.state[i - 1];
      }
      ops.push_back(std::move(k));
    }
  }
  return validate_instrument(std::move(ops));
}

IncoherentInstrument gate_instrument(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) {
    throw CoherenceError(ErrorCode::DimensionMismatch, "gate realization needs a 2x2 unitary");
  }
  const double unitarity = max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(2));
  if (unitarity > 1e-9) {
    throw CoherenceError(ErrorCode::NotUnitary, "max |U^dagger U - 1| = " + std::to_string(unitarity));
  }
  // |k l> has index 2k + l.
  constexpr std::size_t k00 = 0, k01 = 1, k10 = 2, k11 = 3;
  ComplexMatrix k0(4, 4);
  k0(k00, k00) = u(0, 0);
  k0(k10, k01) = u(1, 0);
  k0(k00, k10) = u(0, 1);
  k0(k10, k11) = u(1, 1);
  ComplexMatrix k1(4, 4);
  k1(k01, k01) = u(0, 0);
  k1(k11, k00) = u(1, 0);
  k1(k01, k11) = u(0, 1);
  k1(k11, k10) = u(1, 1);
  return validate_instrument({std::move(k0), std::move(k1)});
}

StateVector gate_input(const StateVector& phi) {
  if (phi.dim() != 2) throw CoherenceError(ErrorCode::DimensionMismatch, "gate input must be a qubit");
  const double h = 1.0 / std::sqrt(2.0);
  return StateVector({phi[0] * h, phi[0] * h, phi[1] * h, phi[1] * h});
}

namespace {

std::size_t support_size(const StateVector& v) {
  return static_cast<std::size_t>(std::count_if(v.amplitudes().begin(), v.amplitudes().end(),
                                                [](Complex a) { return std::abs(a) > kSupportTolerance; }));
}

// Stable descending-magnitude order; ties keep the original index order.
std::vector<std::size_t> magnitude_order(const StateVector& v) {
  std::vector<std::size_t> order(v.dim());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(v[a]) > std::abs(v[b]); });
  return order;
}

// Matrix of |k> -> |perm[k]>, i.e. sum_k |k><perm[k]| maps v to (v[perm[k]])_k.
ComplexMatrix permutation_matrix(const std::vector<std::size_t>& perm) {
  ComplexMatrix p(perm.size(), perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) p(k, perm[k]) = 1.0;
  return p;
}

}  // namespace

ConversionPlan conversion_instrument(const StateVector& source, const StateVector& target) {
  const std::size_t d = source.dim();
  if (target.dim() != d) {
    throw CoherenceError(ErrorCode::DimensionMismatch, "source and target dimensions differ");
  }
  const std::size_t m_source = support_size(source);
  const std::size_t m_target = support_size(target);
  if (m_source < m_target) {
    throw CoherenceError(ErrorCode::SupportTooSmall,
                         "source support " + std::to_string(m_source) + " < target support " +
                             std::to_string(m_target));
  }

  std::vector<std::size_t> perm_source(d), perm_target(d);
  if (m_source == d) {
    std::iota(perm_source.begin(), perm_source.end(), std::size_t{0});
    perm_target = perm_source;
  } else {
    perm_source = magnitude_order(source);
    perm_target = magnitude_order(target);
  }
  const std::size_t m = m_source;
  std::vector<Complex> psi(d), phi(d);
  for (std::size_t k = 0; k < d; ++k) {
    psi[k] = source[perm_source[k]];
    phi[k] = target[perm_target[k]];
  }

  double ratio_sum = 0.0;
  for (std::size_t l = 0; l < m; ++l) ratio_sum += std::norm(phi[l] / psi[l]);
  if (!(ratio_sum > 0.0) || !std::isfinite(ratio_sum)) {
    throw CoherenceError(ErrorCode::ZeroOverlapDegenerate,
                         "target has no weight on the aligned source support");
  }
  const double p1 = 1.0 / ratio_sum;
  const double sqrt_p1 = std::sqrt(p1);

  // L_n = K_n (+) 0 on the support, then basis projectors on the rest.
  std::vector<ComplexMatrix> aligned;
  aligned.reserve(d);
  for (std::size_t n = 0; n < m; ++n) {
    ComplexMatrix k(d, d);
    for (std::size_t l = 0; l < m; ++l) k(l, (l + n) % m) = sqrt_p1 * phi[l] / psi[l];
    aligned.push_back(std::move(k));
  }
  for (std::size_t l = m; l < d; ++l) {
    ComplexMatrix k(d, d);
    k(l, l) = 1.0;
    aligned.push_back(std::move(k));
  }

  const ComplexMatrix p_source = permutation_matrix(perm_source);
  const ComplexMatrix p_target_inv = permutation_matrix(perm_target).adjoint();
  std::vector<ComplexMatrix> ops;
  ops.reserve(aligned.size());
  for (const auto& k : aligned) ops.push_back(p_target_inv * k * p_source);

  return ConversionPlan{source,
                        target,
                        validate_instrument(std::move(ops), InstrumentMode::Selective),
                        0,
                        p1,
                        std::move(perm_source),
                        std::move(perm_target),
                        m_source,
                        m_target};
}

CounterexampleParams::CounterexampleParams(Complex a, Complex b) : alpha(a), beta(b) {
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw CoherenceError(ErrorCode::InvalidArgument,
                         "|alpha|^2 + |beta|^2 = " + std::to_string(norm));
  }
}

CounterexampleParams CounterexampleParams::from_beta2(double beta2) {
  if (!(beta2 >= 0.0 && beta2 <= 1.0)) {
    throw CoherenceError(ErrorCode::InvalidArgument, "|beta|^2 must lie in [0, 1]");
  }
  return CounterexampleParams(std::sqrt(1.0 - beta2), std::sqrt(beta2));
}

DensityMatrix counterexample_state() {
  const std::vector<Complex> psi1{0.0, 1.0, 0.0};
  const double h = 1.0 / std::sqrt(2.0);
  const std::vector<Complex> psi2{h, 0.0, h};
  ComplexMatrix rho = ComplexMatrix::outer(psi1, psi1) + ComplexMatrix::outer(psi2, psi2);
  rho *= 0.5;
  return DensityMatrix::validate(rho);
}

IncoherentInstrument counterexample_instrument(const CounterexampleParams& params) {
  ComplexMatrix k1(3, 3);
  k1(0, 1) = 1.0;
  k1(2, 2) = params.alpha;
  ComplexMatrix k2(3, 3);
  k2(0, 0) = 1.0;
  k2(1, 2) = params.beta;
  return validate_instrument({std::move(k1), std::move(k2)}, InstrumentMode::Selective);
}

CounterexampleResult l2_counterexample(const CounterexampleParams& params, double threshold) {
  const DensityMatrix rho = counterexample_state();
  const auto outcomes = apply_selective(counterexample_instrument(params), rho);
  CounterexampleResult result;
  result.c_l2_state = c_l2(rho).value;
  for (const auto& o : outcomes) {
    result.probabilities.push_back(o.probability);
    if (o.state) result.average_after += o.probability * c_l2(*o.state).value;
  }
  const double b2 = std::norm(params.beta);
  result.average_closed_form = b2 / (2.0 * (1.0 + b2));
  result.residual = result.c_l2_state - result.average_after;
  result.violated = result.residual < -threshold;
  return result;
}

}  // namespace coherence
