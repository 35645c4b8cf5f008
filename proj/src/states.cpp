#include "coherence/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "coherence/error.hpp"

namespace coherence {

namespace {

constexpr double kHermitianTolerance = 1e-9;
constexpr double kTraceTolerance = 1e-9;
constexpr double kNormTolerance = 1e-9;

std::string fmt_residual(double r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "residual %.3e", r);
  return buf;
}

}  // namespace

DensityMatrix DensityMatrix::validate(const ComplexMatrix& m) {
  if (!m.is_square() || m.rows() == 0) {
    throw ValidationError({{ErrorCode::NotSquare, 0.0,
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols())}});
  }
  std::vector<Violation> violations;
  const double herm = hermiticity_residual(m);
  if (herm > kHermitianTolerance) {
    violations.push_back({ErrorCode::NotHermitian, herm, fmt_residual(herm)});
  }
  const double trace_residual = std::abs(m.trace() - Complex(1.0));
  if (trace_residual > kTraceTolerance) {
    violations.push_back({ErrorCode::NotUnitTrace, trace_residual, fmt_residual(trace_residual)});
  }
  ComplexMatrix h = hermitian_part(m);
  // Positivity is only meaningful for the Hermitian part; check it even when
  // hermiticity failed so the caller sees every problem at once.
  const Spectrum s = eig_hermitian(h);
  const double lowest = s.eigenvalues.back();
  if (lowest < -kPsdTolerance) {
    violations.push_back({ErrorCode::NotPSD, -lowest,
                          "lowest eigenvalue " + std::to_string(lowest)});
  }
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return DensityMatrix(std::move(h));
}

std::vector<double> DensityMatrix::diagonal() const {
  std::vector<double> d(dim());
  for (std::size_t i = 0; i < dim(); ++i) d[i] = matrix_(i, i).real();
  return d;
}

StateVector::StateVector(std::vector<Complex> amplitudes, double tolerance)
    : amplitudes_(std::move(amplitudes)) {
  double norm2 = 0.0;
  for (const auto& a : amplitudes_) norm2 += std::norm(a);
  if (amplitudes_.empty() || std::abs(std::sqrt(norm2) - 1.0) > tolerance) {
    throw CoherenceError(ErrorCode::InvalidArgument,
                         "state vector norm " + std::to_string(std::sqrt(norm2)) + " is not 1");
  }
}

StateVector StateVector::normalized(std::vector<Complex> amplitudes) {
  double norm2 = 0.0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  if (norm2 == 0.0) throw CoherenceError(ErrorCode::InvalidArgument, "zero vector");
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& a : amplitudes) a *= inv;
  return StateVector(std::move(amplitudes));
}

DensityMatrix StateVector::density() const {
  return DensityMatrix::validate(ComplexMatrix::outer(amplitudes_, amplitudes_));
}

IncoherentState::IncoherentState(std::vector<double> weights) : weights_(std::move(weights)) {
  double total = 0.0;
  for (double& w : weights_) {
    if (!(w >= -kNormTolerance)) {
      throw CoherenceError(ErrorCode::InvalidArgument, "negative incoherent weight");
    }
    w = std::max(w, 0.0);
    total += w;
  }
  if (weights_.empty() || std::abs(total - 1.0) > kNormTolerance) {
    throw CoherenceError(ErrorCode::InvalidArgument,
                         "incoherent weights sum to " + std::to_string(total));
  }
}

DensityMatrix IncoherentState::density() const {
  return DensityMatrix::validate(ComplexMatrix::diagonal(std::span<const double>(weights_)));
}

DensityMatrix dephase(const DensityMatrix& rho) {
  const std::vector<double> d = rho.diagonal();
  return DensityMatrix::validate(ComplexMatrix::diagonal(std::span<const double>(d)));
}

double max_off_diagonal(const ComplexMatrix& m) {
  double out = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (i != j) out = std::max(out, std::abs(m(i, j)));
    }
  }
  return out;
}

bool is_incoherent_state(const DensityMatrix& rho, double tol) {
  return max_off_diagonal(rho.matrix()) <= tol;
}

DensityMatrix partial_trace_second(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b) {
  if (dim_a * dim_b != rho.dim()) {
    throw CoherenceError(ErrorCode::DimensionMismatch, "partial trace factor dimensions");
  }
  ComplexMatrix out(dim_a, dim_a);
  for (std::size_t i = 0; i < dim_a; ++i) {
    for (std::size_t j = 0; j < dim_a; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < dim_b; ++k) acc += rho(i * dim_b + k, j * dim_b + k);
      out(i, j) = acc;
    }
  }
  return DensityMatrix::validate(out);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_norm(rho.matrix() - sigma.matrix());
}

double von_neumann_entropy(const DensityMatrix& rho, double zero_threshold) {
  return von_neumann_entropy(rho.matrix(), zero_threshold);
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double zero_threshold) {
  return relative_entropy(rho.matrix(), sigma.matrix(), zero_threshold);
}

}  // namespace coherence
