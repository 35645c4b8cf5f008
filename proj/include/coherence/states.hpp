#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coherence/linalg.hpp"

namespace coherence {

/// Hermitian, positive semidefinite, unit-trace matrix over the fixed
/// incoherent basis. Only obtainable through validation, so holding one is a
/// certificate.
class DensityMatrix {
 public:
  /// Throws ValidationError listing every violated invariant (NotSquare,
  /// NotHermitian, NotUnitTrace, NotPSD) with residuals.
  static DensityMatrix validate(const ComplexMatrix& m);

  std::size_t dim() const noexcept { return matrix_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Complex operator()(std::size_t r, std::size_t c) const { return matrix_(r, c); }
  std::vector<double> diagonal() const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {}
  ComplexMatrix matrix_;
};

inline DensityMatrix validate_density(const ComplexMatrix& m) { return DensityMatrix::validate(m); }

/// Unit vector over the incoherent basis.
class StateVector {
 public:
  /// Throws InvalidArgument unless the Euclidean norm is 1 within tolerance.
  explicit StateVector(std::vector<Complex> amplitudes, double tolerance = 1e-9);
  /// Rescales to unit norm; throws InvalidArgument on the zero vector.
  static StateVector normalized(std::vector<Complex> amplitudes);

  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }

  DensityMatrix density() const;

 private:
  std::vector<Complex> amplitudes_;
};

/// A diagonal density matrix, stored as its probability vector.
class IncoherentState {
 public:
  /// Weights must be nonnegative (within 1e-9) and sum to 1 within 1e-9.
  explicit IncoherentState(std::vector<double> weights);

  std::size_t dim() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  DensityMatrix density() const;

 private:
  std::vector<double> weights_;
};

/// Deletes all off-diagonal entries.
DensityMatrix dephase(const DensityMatrix& rho);

/// Largest off-diagonal magnitude.
double max_off_diagonal(const ComplexMatrix& m);
bool is_incoherent_state(const DensityMatrix& rho, double tol = 1e-10);

/// Traces out the second factor of a (dim_a * dim_b)-dimensional state.
DensityMatrix partial_trace_second(const DensityMatrix& rho, std::size_t dim_a, std::size_t dim_b);

/// Trace distance ||rho - sigma||_tr (no factor 1/2).
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

double von_neumann_entropy(const DensityMatrix& rho, double zero_threshold = kEntropyZeroThreshold);
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                        double zero_threshold = kEntropyZeroThreshold);

}  // namespace coherence
