#pragma once

// Shared helpers for the test binaries: conversions to Eigen (the independent
// numerical route), seeded random fixtures, and a brute-force simplex grid
// oracle for the optimizer-backed measures.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "coherence/channels.hpp"
#include "coherence/lab.hpp"
#include "coherence/linalg.hpp"
#include "coherence/states.hpp"

namespace testing_support {

using coherence::Complex;
using coherence::ComplexMatrix;
using coherence::DensityMatrix;
using EMatrix = Eigen::MatrixXcd;

inline EMatrix to_eigen(const ComplexMatrix& m) {
  EMatrix e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  }
  return e;
}

inline ComplexMatrix from_eigen(const EMatrix& e) {
  ComplexMatrix m(e.rows(), e.cols());
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  }
  return m;
}

inline Eigen::VectorXd eigen_eigenvalues(const EMatrix& h) {
  return Eigen::SelfAdjointEigenSolver<EMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

inline double eigen_trace_norm(const EMatrix& m) {
  return Eigen::JacobiSVD<EMatrix>(m).singularValues().sum();
}

inline double eigen_entropy(const EMatrix& rho) {
  double s = 0.0;
  for (double l : eigen_eigenvalues(rho)) {
    if (l > 1e-12) s -= l * std::log2(l);
  }
  return s;
}

inline EMatrix eigen_psd_sqrt(const EMatrix& p) {
  Eigen::SelfAdjointEigenSolver<EMatrix> es(p);
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

/// Eigen-side support factor: columns sqrt(lambda) v for eigenvalues above 1e-14.
inline EMatrix eigen_support_factor(const EMatrix& p) {
  Eigen::SelfAdjointEigenSolver<EMatrix> es(p);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()[k] > 1e-14) keep.push_back(k);
  }
  EMatrix g = EMatrix::Zero(p.rows(), std::max<Eigen::Index>(1, static_cast<Eigen::Index>(keep.size())));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    g.col(static_cast<Eigen::Index>(c)) = std::sqrt(es.eigenvalues()[keep[c]]) * es.eigenvectors().col(keep[c]);
  }
  return g;
}

/// sqrt(F(rho, sigma)) as the sum of square roots of the spectrum of G^dagger sigma G.
inline double eigen_root_fidelity(const EMatrix& rho, const EMatrix& sigma) {
  const EMatrix g = eigen_support_factor(rho);
  const EMatrix inner = g.adjoint() * sigma * g;
  return eigen_eigenvalues(inner).cwiseMax(0.0).cwiseSqrt().sum();
}

/// Random Hermitian matrix with Gaussian entries.
inline ComplexMatrix random_hermitian(std::size_t d, coherence::Rng& rng) {
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < d; ++j) {
      m(i, j) = rng.complex_normal();
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, coherence::Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.complex_normal();
  }
  return m;
}

inline DensityMatrix random_incoherent(std::size_t d, coherence::Rng& rng) {
  const auto w = coherence::random_dirichlet(d, rng);
  return DensityMatrix::validate(ComplexMatrix::diagonal(std::span<const double>(w)));
}

/// Brute-force minimum of a function over the probability simplex (d = 2 or
/// 3): a full grid (d = 2 at `step`; d = 3 coarse at 10 * step, then at `step`
/// in a window around the coarse optimum), followed by compass-search
/// refinement.
struct GridResult {
  std::vector<double> weights;
  double value = std::numeric_limits<double>::infinity();
};

inline GridResult grid_minimize(std::size_t d, const std::function<double(const std::vector<double>&)>& f,
                                double step = 1e-3) {
  GridResult best;
  auto consider = [&](const std::vector<double>& w) {
    const double v = f(w);
    if (v < best.value) {
      best.value = v;
      best.weights = w;
    }
  };
  if (d == 1) {
    consider({1.0});
    return best;
  }
  if (d == 2) {
    const int n = static_cast<int>(std::lround(1.0 / step));
    for (int i = 0; i <= n; ++i) {
      const double a = static_cast<double>(i) / n;
      consider({a, 1.0 - a});
    }
  } else if (d == 3) {
    const double coarse = 10.0 * step;
    const int n = static_cast<int>(std::lround(1.0 / coarse));
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        const double a = static_cast<double>(i) / n, b = static_cast<double>(j) / n;
        consider({a, b, std::max(0.0, 1.0 - a - b)});
      }
    }
    const double a0 = best.weights[0], b0 = best.weights[1];
    const int window = static_cast<int>(std::lround(3.0 * coarse / step));
    for (int i = -window; i <= window; ++i) {
      for (int j = -window; j <= window; ++j) {
        const double a = a0 + i * step, b = b0 + j * step;
        if (a < 0.0 || b < 0.0 || a + b > 1.0) continue;
        consider({a, b, std::max(0.0, 1.0 - a - b)});
      }
    }
  } else {
    throw std::invalid_argument("grid oracle supports d <= 3");
  }

  // Pattern search over the first d - 1 coordinates. For d = 3 a fan of 48
  // directions keeps it from stalling in valleys along the trace-norm kinks.
  std::vector<std::vector<double>> dirs;
  if (d == 2) {
    dirs = {{1.0}, {-1.0}};
  } else {
    for (int k = 0; k < 48; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 48.0;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
  }
  for (double h = step; h > 1e-11; h *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (const auto& dir : dirs) {
        std::vector<double> w(d);
        double last = 1.0;
        bool feasible = true;
        for (std::size_t i = 0; i + 1 < d; ++i) {
          w[i] = best.weights[i] + h * dir[i];
          if (w[i] < 0.0) feasible = false;
          last -= w[i];
        }
        if (!feasible || last < 0.0) continue;
        w[d - 1] = last;
        const double before = best.value;
        consider(w);
        if (best.value < before) moved = true;
      }
    }
  }
  return best;
}

inline double oracle_trace(const DensityMatrix& rho) {
  const EMatrix r = to_eigen(rho.matrix());
  return grid_minimize(rho.dim(), [&](const std::vector<double>& w) {
           EMatrix diff = r;
           for (std::size_t i = 0; i < w.size(); ++i) diff(i, i) -= w[i];
           return eigen_eigenvalues(diff).cwiseAbs().sum();
         }).value;
}

inline double oracle_fidelity(const DensityMatrix& rho) {
  const EMatrix g = eigen_support_factor(to_eigen(rho.matrix()));
  return grid_minimize(rho.dim(), [&](const std::vector<double>& w) {
           Eigen::VectorXd dw(w.size());
           for (std::size_t i = 0; i < w.size(); ++i) dw[i] = w[i];
           const EMatrix inner = g.adjoint() * dw.asDiagonal() * g;
           const double sqrt_f = eigen_eigenvalues(inner).cwiseMax(0.0).cwiseSqrt().sum();
           return 1.0 - sqrt_f;
         }).value;
}

}  // namespace testing_support
