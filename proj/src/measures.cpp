#include "coherence/measures.hpp"

#include <algorithm>
#include <cmath>

namespace coherence {

std::string_view to_string(MeasureId id) {
  switch (id) {
    case MeasureId::RelEnt: return "REL_ENT";
    case MeasureId::L1: return "L1";
    case MeasureId::L2: return "L2";
    case MeasureId::Fidelity: return "FIDELITY";
    case MeasureId::TraceNorm: return "TRACE_NORM";
  }
  return "UNKNOWN";
}

std::optional<MeasureId> parse_measure(std::string_view name) {
  for (MeasureId id : kAllMeasures) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

ComplexMatrix fidelity_factor(const ComplexMatrix& rho) {
  return gram_factor(rho, kFidelitySupportThreshold);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw CoherenceError(ErrorCode::DimensionMismatch, "fidelity: state dimensions differ");
  }
  const ComplexMatrix g = fidelity_factor(rho.matrix());
  const Spectrum s = eig_hermitian(hermitian_part(g.adjoint() * sigma.matrix() * g));
  double sqrt_f = 0.0;
  for (double mu : s.eigenvalues) sqrt_f += std::sqrt(std::max(mu, 0.0));
  return sqrt_f * sqrt_f;
}

MeasureReport c_rel_ent(const DensityMatrix& rho) {
  const std::vector<double> diag = rho.diagonal();
  const double value = entropy_bits(diag) - von_neumann_entropy(rho);
  MeasureReport report;
  report.measure = MeasureId::RelEnt;
  report.value = std::max(value, 0.0);
  report.minimizer = IncoherentState(diag);
  return report;
}

MeasureReport c_l1(const DensityMatrix& rho) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    for (std::size_t j = 0; j < rho.dim(); ++j) {
      if (i != j) sum += std::abs(rho(i, j));
    }
  }
  MeasureReport report;
  report.measure = MeasureId::L1;
  report.value = sum;
  report.minimizer = IncoherentState(rho.diagonal());
  return report;
}

MeasureReport c_l2(const DensityMatrix& rho) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    for (std::size_t j = 0; j < rho.dim(); ++j) {
      if (i != j) sum += std::norm(rho(i, j));
    }
  }
  MeasureReport report;
  report.measure = MeasureId::L2;
  report.value = sum;
  report.minimizer = IncoherentState(rho.diagonal());
  report.not_a_monotone = true;
  return report;
}

namespace {

MeasureReport from_optimizer(MeasureId id, OptimizationResult result) {
  MeasureReport report;
  report.measure = id;
  report.value = result.value;
  report.optimizer_residual = result.gap;
  report.iterations = result.iterations;
  report.minimizer = std::move(result.minimizer);
  return report;
}

}  // namespace

MeasureReport c_fidelity(const DensityMatrix& rho, const OptimizerOptions& options) {
  MeasureReport report = from_optimizer(
      MeasureId::Fidelity, minimize_over_incoherent(rho, DistanceObjective::Fidelity, options));
  report.dephased_value = 1.0 - std::sqrt(fidelity(rho, dephase(rho)));
  return report;
}

MeasureReport c_trace(const DensityMatrix& rho, const OptimizerOptions& options) {
  MeasureReport report = from_optimizer(
      MeasureId::TraceNorm, minimize_over_incoherent(rho, DistanceObjective::Trace, options));
  report.dephased_value = trace_distance(rho, dephase(rho));
  return report;
}

MeasureReport measure(MeasureId id, const DensityMatrix& rho, const OptimizerOptions& options) {
  switch (id) {
    case MeasureId::RelEnt: return c_rel_ent(rho);
    case MeasureId::L1: return c_l1(rho);
    case MeasureId::L2: return c_l2(rho);
    case MeasureId::Fidelity: return c_fidelity(rho, options);
    case MeasureId::TraceNorm: return c_trace(rho, options);
  }
  throw CoherenceError(ErrorCode::InvalidArgument, "unknown measure");
}

}  // namespace coherence
