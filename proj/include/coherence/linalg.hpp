#pragma once

// Dense complex linear algebra for the small dimensions used throughout the
// library (d up to a few dozen). Everything here is a pure function of its
// arguments.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace coherence {

using Complex = std::complex<double>;

/// Row-major dense complex matrix. All entries are finite.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  /// Zero matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Throws InvalidDimension if entries.size() != rows * cols, NonFinite on
  /// NaN/Inf entries.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const double> diag);
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  /// |a><b|
  static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);
  /// Rows given as nested initializer data; convenient for tests and fixtures.
  static ComplexMatrix from_rows(const std::vector<std::vector<Complex>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<const Complex> entries() const noexcept { return entries_; }
  std::span<const Complex> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }
  std::vector<Complex> column(std::size_t c) const;

  ComplexMatrix adjoint() const;
  Complex trace() const;
  double max_abs() const;
  double frobenius_norm() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix m);
std::vector<Complex> operator*(const ComplexMatrix& m, std::span<const Complex> v);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
/// a * b * a^dagger
ComplexMatrix conjugate_by(const ComplexMatrix& a, const ComplexMatrix& b);
/// Largest |a_ij - b_ij|. Throws DimensionMismatch on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// max |H - H^dagger|
double hermiticity_residual(const ComplexMatrix& h);
/// (H + H^dagger) / 2
ComplexMatrix hermitian_part(const ComplexMatrix& h);

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order; column k of `eigenvectors` belongs to eigenvalues[k].
struct Spectrum {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  /// V diag(lambda) V^dagger
  ComplexMatrix reconstruct() const;
};

struct EigenOptions {
  double hermitian_tolerance = 1e-9;
  int max_sweeps = 100;
  /// Off-diagonal Frobenius norm, relative to the input norm, at which a
  /// sweep loop stops.
  double off_diagonal_tolerance = 1e-13;
};

/// Cyclic Jacobi eigensolver for Hermitian matrices. Throws NotSquare,
/// NotHermitian (|H - H^dagger|_max above tolerance) or NoConvergence.
Spectrum eig_hermitian(const ComplexMatrix& h, const EigenOptions& options = {});

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

/// Eigenvalues in (-psd_tolerance, 0) are clamped to zero; anything more
/// negative throws NotPSD.
inline constexpr double kPsdTolerance = 1e-9;
/// Eigenvalues at or below this are exact zeros for entropy and support
/// computations.
inline constexpr double kEntropyZeroThreshold = 1e-12;

ComplexMatrix psd_sqrt(const ComplexMatrix& p);

/// G with G G^dagger = P, one column sqrt(lambda_k) v_k per eigenvalue above
/// `threshold` (at least one column, zero if P vanishes).
ComplexMatrix gram_factor(const ComplexMatrix& p, double threshold = 0.0);

/// Shannon entropy in bits of a spectrum, ignoring values <= zero_threshold.
double entropy_bits(std::span<const double> probabilities,
                    double zero_threshold = kEntropyZeroThreshold);

/// -tr(rho log2 rho) of a Hermitian PSD matrix.
double von_neumann_entropy(const ComplexMatrix& rho,
                           double zero_threshold = kEntropyZeroThreshold);

/// tr(rho log2 rho) - tr(rho log2 sigma); +infinity when the support of rho
/// is not contained in the support of sigma.
double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                        double zero_threshold = kEntropyZeroThreshold);

}  // namespace coherence
