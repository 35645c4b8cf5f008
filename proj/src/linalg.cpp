#include "coherence/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "coherence/error.hpp"

namespace coherence {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw CoherenceError(ErrorCode::DimensionMismatch,
                         std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
  }
}

void require_square(const ComplexMatrix& m, const char* op) {
  if (!m.is_square()) {
    throw CoherenceError(ErrorCode::NotSquare, std::string(op) + ": " + std::to_string(m.rows()) +
                                                   "x" + std::to_string(m.cols()));
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw CoherenceError(ErrorCode::InvalidDimension,
                         "expected " + std::to_string(rows_ * cols_) + " entries, got " +
                             std::to_string(entries_.size()));
  }
  for (const auto& z : entries_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw CoherenceError(ErrorCode::NonFinite, "matrix entry is NaN or infinite");
    }
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
  ComplexMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  }
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(const std::vector<std::vector<Complex>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  std::vector<Complex> entries;
  entries.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw CoherenceError(ErrorCode::InvalidDimension, "ragged rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return ComplexMatrix(r, c, std::move(entries));
}

std::vector<Complex> ComplexMatrix::column(std::size_t c) const {
  std::vector<Complex> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  }
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : entries_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : entries_) s += std::norm(z);
  return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : entries_) z *= scale;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw CoherenceError(ErrorCode::DimensionMismatch,
                         "product of " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                             " and " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

std::vector<Complex> operator*(const ComplexMatrix& m, std::span<const Complex> v) {
  if (m.cols() != v.size()) {
    throw CoherenceError(ErrorCode::DimensionMismatch, "matrix-vector product");
  }
  std::vector<Complex> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k) {
        for (std::size_t l = 0; l < b.cols(); ++l) {
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
      }
    }
  }
  return out;
}

ComplexMatrix conjugate_by(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b * a.adjoint();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return m;
}

double hermiticity_residual(const ComplexMatrix& h) {
  require_square(h, "hermiticity_residual");
  double m = 0.0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = i; j < h.cols(); ++j) {
      m = std::max(m, std::abs(h(i, j) - std::conj(h(j, i))));
    }
  }
  return m;
}

ComplexMatrix hermitian_part(const ComplexMatrix& h) {
  require_square(h, "hermitian_part");
  ComplexMatrix out(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.rows(); ++i) {
    out(i, i) = h(i, i).real();
    for (std::size_t j = i + 1; j < h.cols(); ++j) {
      const Complex v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  }
  return out;
}

ComplexMatrix Spectrum::reconstruct() const {
  const std::size_t n = eigenvalues.size();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eigenvalues[k];
    if (lambda == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = lambda * eigenvectors(i, k);
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vik * std::conj(eigenvectors(j, k));
    }
  }
  return out;
}

Spectrum eig_hermitian(const ComplexMatrix& h, const EigenOptions& options) {
  require_square(h, "eig_hermitian");
  const double herm = hermiticity_residual(h);
  if (herm > options.hermitian_tolerance) {
    throw CoherenceError(ErrorCode::NotHermitian,
                         "max |H - H^dagger| = " + std::to_string(herm));
  }
  const std::size_t n = h.rows();
  ComplexMatrix a = hermitian_part(h);
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    }
    return std::sqrt(2.0 * s);
  };

  const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  const double target = options.off_diagonal_tolerance * scale;
  int sweep = 0;
  for (; off_norm() > target; ++sweep) {
    if (sweep >= options.max_sweeps) {
      throw CoherenceError(ErrorCode::NoConvergence,
                           "Jacobi exceeded " + std::to_string(options.max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        // Phase rotation makes the (p, q) entry real, then a real Jacobi
        // rotation annihilates it. Combined unitary on (p, q):
        //   [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        const Complex phase = apq / r;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const Complex e_minus = std::conj(phase);

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * e_minus * akq;
          a(k, q) = s * akp + c * e_minus * akq;
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s * e_minus * vkq;
          v(k, q) = s * vkp + c * e_minus * vkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() > a(y, y).real();
  });
  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

double trace_norm(const ComplexMatrix& m) {
  require_square(m, "trace_norm");
  const double scale = std::max(1.0, m.max_abs());
  if (hermiticity_residual(m) <= 1e-12 * scale) {
    const Spectrum s = eig_hermitian(m);
    double sum = 0.0;
    for (double lambda : s.eigenvalues) sum += std::abs(lambda);
    return sum;
  }
  const Spectrum s = eig_hermitian(m.adjoint() * m, {.hermitian_tolerance = 1e-9 * scale * scale});
  double sum = 0.0;
  for (double lambda : s.eigenvalues) sum += std::sqrt(std::max(lambda, 0.0));
  return sum;
}

ComplexMatrix gram_factor(const ComplexMatrix& p, double threshold) {
  const Spectrum s = eig_hermitian(p);
  std::size_t rank = 0;
  for (double lambda : s.eigenvalues) rank += lambda > threshold ? 1 : 0;
  ComplexMatrix f(p.rows(), std::max<std::size_t>(rank, 1));
  for (std::size_t k = 0; k < rank; ++k) {
    const double root = std::sqrt(s.eigenvalues[k]);
    for (std::size_t i = 0; i < p.rows(); ++i) f(i, k) = root * s.eigenvectors(i, k);
  }
  return f;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& p) {
  Spectrum s = eig_hermitian(p);
  for (double& lambda : s.eigenvalues) {
    if (lambda < -kPsdTolerance) {
      throw CoherenceError(ErrorCode::NotPSD, "eigenvalue " + std::to_string(lambda));
    }
    lambda = std::sqrt(std::max(lambda, 0.0));
  }
  return s.reconstruct();
}

double entropy_bits(std::span<const double> probabilities, double zero_threshold) {
  double h = 0.0;
  for (double p : probabilities) {
    if (p > zero_threshold) h -= p * std::log2(p);
  }
  return h;
}

double von_neumann_entropy(const ComplexMatrix& rho, double zero_threshold) {
  const Spectrum s = eig_hermitian(rho);
  return entropy_bits(s.eigenvalues, zero_threshold);
}

double relative_entropy(const ComplexMatrix& rho, const ComplexMatrix& sigma,
                        double zero_threshold) {
  require_square(rho, "relative_entropy");
  require_square(sigma, "relative_entropy");
  if (rho.rows() != sigma.rows()) {
    throw CoherenceError(ErrorCode::DimensionMismatch, "relative_entropy: state dimensions differ");
  }
  const Spectrum sig = eig_hermitian(sigma);
  const std::size_t n = rho.rows();
  double cross = 0.0;        // tr(rho log2 sigma) on the support of sigma
  double outside = 0.0;      // weight of rho on the kernel of sigma
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<Complex> vk = sig.eigenvectors.column(k);
    const std::vector<Complex> rv = rho * std::span<const Complex>(vk);
    Complex overlap = 0.0;
    for (std::size_t i = 0; i < n; ++i) overlap += std::conj(vk[i]) * rv[i];
    const double weight = overlap.real();
    if (sig.eigenvalues[k] > zero_threshold) {
      cross += weight * std::log2(sig.eigenvalues[k]);
    } else {
      outside += weight;
    }
  }
  if (outside > zero_threshold) return std::numeric_limits<double>::infinity();
  return -von_neumann_entropy(rho, zero_threshold) - cross;
}

}  // namespace coherence
