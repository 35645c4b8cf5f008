#include "coherence/channels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace coherence {

namespace {

// With rho = F F^dagger, forming K rho K^dagger as (K F)(K F)^dagger keeps it
// exactly positive semidefinite.
ComplexMatrix gram(const ComplexMatrix& b) { return b * b.adjoint(); }

void require_input_dim(const IncoherentInstrument& channel, const DensityMatrix& rho) {
  if (channel.input_dim() != rho.dim()) {
    throw CoherenceError(ErrorCode::DimensionMismatch,
                         "instrument acts on dimension " + std::to_string(channel.input_dim()) +
                             ", state has dimension " + std::to_string(rho.dim()));
  }
}

}  // namespace

bool has_incoherent_columns(const ComplexMatrix& k, double tol) {
  for (std::size_t c = 0; c < k.cols(); ++c) {
    int nonzero = 0;
    for (std::size_t r = 0; r < k.rows(); ++r) nonzero += std::abs(k(r, c)) > tol ? 1 : 0;
    if (nonzero > 1) return false;
  }
  return true;
}

bool maps_basis_states_to_diagonal(const ComplexMatrix& k, double tol) {
  for (std::size_t i = 0; i < k.cols(); ++i) {
    // K|i><i|K^dagger = |k_i><k_i| for column k_i.
    for (std::size_t a = 0; a < k.rows(); ++a) {
      for (std::size_t b = a + 1; b < k.rows(); ++b) {
        if (std::abs(k(a, i) * std::conj(k(b, i))) > tol * tol) return false;
      }
    }
  }
  return true;
}

InstrumentCheck check_instrument(std::span<const ComplexMatrix> ops) {
  if (ops.empty()) throw CoherenceError(ErrorCode::InvalidArgument, "empty Kraus list");
  const std::size_t d_in = ops.front().cols();
  InstrumentCheck check;
  check.completeness_residual = ComplexMatrix(d_in, d_in);
  for (std::size_t n = 0; n < ops.size(); ++n) {
    const ComplexMatrix& k = ops[n];
    if (k.cols() != d_in) {
      throw CoherenceError(ErrorCode::DimensionMismatch,
                           "Kraus operator " + std::to_string(n) + " has input dimension " +
                               std::to_string(k.cols()) + ", expected " + std::to_string(d_in));
    }
    check.completeness_residual += k.adjoint() * k;
    for (std::size_t c = 0; c < k.cols(); ++c) {
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < k.rows(); ++r) {
        if (std::abs(k(r, c)) > kIncoherenceTolerance) rows.push_back(r);
      }
      if (rows.size() > 1) check.coherence_witnesses.push_back({n, c, rows[0], rows[1]});
    }
    if (!maps_basis_states_to_diagonal(k)) check.direct_check_incoherent = false;
  }
  check.completeness_residual -= ComplexMatrix::identity(d_in);
  check.completeness_max = check.completeness_residual.max_abs();
  return check;
}

std::optional<std::size_t> IncoherentInstrument::uniform_output_dim() const {
  const std::size_t d_out = kraus_.front().rows();
  for (const auto& k : kraus_) {
    if (k.rows() != d_out) return std::nullopt;
  }
  return d_out;
}

IncoherentInstrument validate_instrument(std::vector<ComplexMatrix> ops, InstrumentMode mode) {
  const InstrumentCheck check = check_instrument(ops);
  std::vector<Violation> violations;
  if (!check.complete()) {
    violations.push_back({ErrorCode::IncompleteInstrument, check.completeness_max,
                          "max |sum K^dagger K - 1| = " + std::to_string(check.completeness_max)});
  }
  for (const auto& w : check.coherence_witnesses) {
    violations.push_back({ErrorCode::CoherenceGenerating, 0.0,
                          "operator " + std::to_string(w.operator_index) + " maps |" +
                              std::to_string(w.column) + "> onto rows " +
                              std::to_string(w.row_a) + " and " + std::to_string(w.row_b),
                          w});
  }
  if (check.coherence_witnesses.empty() && !check.direct_check_incoherent) {
    violations.push_back({ErrorCode::CoherenceGenerating, 0.0,
                          "a basis state is mapped to a non-diagonal state"});
  }
  if (mode == InstrumentMode::NonSelective) {
    for (const auto& k : ops) {
      if (k.rows() != ops.front().rows()) {
        violations.push_back({ErrorCode::MixedOutputDims, 0.0,
                              "class (A) operators must share one output dimension"});
        break;
      }
    }
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return IncoherentInstrument(std::move(ops), mode);
}

DensityMatrix apply_channel(const IncoherentInstrument& channel, const DensityMatrix& rho) {
  require_input_dim(channel, rho);
  const auto d_out = channel.uniform_output_dim();
  if (!d_out) {
    throw CoherenceError(ErrorCode::MixedOutputDims,
                         "non-selective application needs a common output dimension");
  }
  const ComplexMatrix f = gram_factor(rho.matrix());
  ComplexMatrix out(*d_out, *d_out);
  for (const auto& k : channel.kraus()) out += gram(k * f);
  return DensityMatrix::validate(out);
}

std::vector<MeasurementOutcome> apply_selective(const IncoherentInstrument& channel,
                                                const DensityMatrix& rho) {
  require_input_dim(channel, rho);
  const ComplexMatrix f = gram_factor(rho.matrix());
  std::vector<MeasurementOutcome> outcomes;
  outcomes.reserve(channel.size());
  for (const auto& k : channel.kraus()) {
    const ComplexMatrix b = k * f;
    const double p = b.frobenius_norm() * b.frobenius_norm();
    MeasurementOutcome outcome{p, std::nullopt};
    if (p > kNullOutcomeProbability) {
      outcome.state = DensityMatrix::validate((1.0 / p) * gram(b));
    }
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

DensityMatrix flag_embed(std::span<const MeasurementOutcome> outcomes) {
  std::optional<std::size_t> d;
  for (const auto& o : outcomes) {
    if (!o.state) continue;
    if (d && *d != o.state->dim()) {
      throw CoherenceError(ErrorCode::DimensionMismatch, "outcome states differ in dimension");
    }
    d = o.state->dim();
  }
  if (!d) throw CoherenceError(ErrorCode::InvalidArgument, "no non-null outcome to embed");
  const std::size_t n = outcomes.size();
  ComplexMatrix out(n * *d, n * *d);
  for (std::size_t i = 0; i < n; ++i) {
    if (!outcomes[i].state) continue;
    const ComplexMatrix& block = outcomes[i].state->matrix();
    for (std::size_t r = 0; r < *d; ++r) {
      for (std::size_t c = 0; c < *d; ++c) {
        out(i * *d + r, i * *d + c) = outcomes[i].probability * block(r, c);
      }
    }
  }
  return DensityMatrix::validate(out);
}

}  // namespace coherence
