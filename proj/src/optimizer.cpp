// Minimization of convex distances over the incoherent states.
//
// Incoherent states are parameterized by the first d-1 weights x, with
// delta = (x, 1 - sum x). The feasible set is {x >= 0, sum x <= 1}. The
// ellipsoid method keeps an ellipsoid {y : (y-c)^T P^{-1} (y-c) <= 1} that
// always contains a minimizer; each step cuts it in half through its center,
// with a constraint cut when the center is infeasible and a subgradient cut
// otherwise. Two lower bounds on the minimum are tracked:
//   f(c) - sqrt(g^T P g)            (minimum of the cut model over the ellipsoid)
//   f(c) + min_i g_i - <g, delta>   (minimum of the cut model over the simplex)
// and the loop stops when best value minus lower bound is below target.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "coherence/measures.hpp"

namespace coherence {

namespace {

struct Evaluation {
  double value = 0.0;
  std::vector<double> gradient;  // with respect to delta
};

class FidelityObjective {
 public:
  explicit FidelityObjective(const DensityMatrix& rho) {
    const Spectrum s = eig_hermitian(rho.matrix());
    if (s.eigenvalues.front() >= 1.0 - 1e-12) {
      // Pure rho: F(psi, delta) = <psi|delta|psi>.
      pure_weights_.resize(rho.dim());
      for (std::size_t i = 0; i < rho.dim(); ++i) pure_weights_[i] = std::norm(s.eigenvectors(i, 0));
    } else {
      factor_ = fidelity_factor(rho.matrix());
    }
  }

  Evaluation operator()(std::span<const double> delta, bool with_gradient) const {
    Evaluation out;
    if (!pure_weights_.empty()) {
      double overlap = 0.0;
      for (std::size_t i = 0; i < delta.size(); ++i) overlap += delta[i] * pure_weights_[i];
      const double root = std::sqrt(std::max(overlap, 0.0));
      out.value = 1.0 - root;
      if (with_gradient) {
        const double denom = 2.0 * std::max(root, 1e-150);
        out.gradient.resize(delta.size());
        for (std::size_t i = 0; i < delta.size(); ++i) out.gradient[i] = -pure_weights_[i] / denom;
      }
      return out;
    }
    // Nonzero spectrum of sqrt(rho) delta sqrt(rho) = spectrum of G^dagger delta G.
    const std::size_t n = factor_.rows(), r = factor_.cols();
    ComplexMatrix m(r, r);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = a; b < r; ++b) {
        Complex acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += std::conj(factor_(i, a)) * delta[i] * factor_(i, b);
        m(a, b) = acc;
        m(b, a) = std::conj(acc);
      }
    }
    const Spectrum s = eig_hermitian(m);
    double sqrt_f = 0.0;
    for (double mu : s.eigenvalues) sqrt_f += std::sqrt(std::max(mu, 0.0));
    out.value = 1.0 - sqrt_f;
    if (with_gradient) {
      // d sqrt(F) / d delta_i = 1/2 g_i^dagger M^{-1/2} g_i with g_i = G^dagger |i>.
      out.gradient.assign(n, 0.0);
      for (std::size_t k = 0; k < r; ++k) {
        const double mu = s.eigenvalues[k];
        if (!(mu > 0.0)) continue;
        const double inv_root = 1.0 / std::sqrt(mu);
        for (std::size_t i = 0; i < n; ++i) {
          Complex overlap = 0.0;
          for (std::size_t a = 0; a < r; ++a) overlap += std::conj(s.eigenvectors(a, k) * factor_(i, a));
          out.gradient[i] -= 0.5 * std::norm(overlap) * inv_root;
        }
      }
    }
    return out;
  }

 private:
  std::vector<double> pure_weights_;
  ComplexMatrix factor_;  // rho = G G^dagger over the support of rho
};

class TraceObjective {
 public:
  explicit TraceObjective(const DensityMatrix& rho) : rho_(rho.matrix()) {}

  Evaluation operator()(std::span<const double> delta, bool with_gradient) const {
    ComplexMatrix x = rho_;
    for (std::size_t i = 0; i < delta.size(); ++i) x(i, i) -= delta[i];
    const Spectrum s = eig_hermitian(x);
    Evaluation out;
    for (double lambda : s.eigenvalues) out.value += std::abs(lambda);
    if (with_gradient) {
      // Subgradient of ||rho - delta||_tr: -sum_k sign(lambda_k) |v_k(i)|^2.
      out.gradient.assign(delta.size(), 0.0);
      for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
        const double lambda = s.eigenvalues[k];
        const double sign = lambda > 0.0 ? 1.0 : (lambda < 0.0 ? -1.0 : 0.0);
        if (sign == 0.0) continue;
        for (std::size_t i = 0; i < delta.size(); ++i) {
          out.gradient[i] -= sign * std::norm(s.eigenvectors(i, k));
        }
      }
    }
    return out;
  }

 private:
  ComplexMatrix rho_;
};

using Objective = std::function<Evaluation(std::span<const double>, bool)>;

std::vector<double> to_delta(std::span<const double> x) {
  std::vector<double> delta(x.begin(), x.end());
  const double rest = 1.0 - std::accumulate(x.begin(), x.end(), 0.0);
  delta.push_back(std::max(rest, 0.0));
  return delta;
}

bool feasible(std::span<const double> x) {
  double sum = 0.0;
  for (double xi : x) {
    if (xi < 0.0) return false;
    sum += xi;
  }
  return sum <= 1.0;
}

double simplex_lower_bound(const Evaluation& e, std::span<const double> delta) {
  double inner = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) inner += e.gradient[i] * delta[i];
  return e.value + *std::min_element(e.gradient.begin(), e.gradient.end()) - inner;
}

struct Search {
  std::vector<double> best_delta;
  double best_value = std::numeric_limits<double>::infinity();
  double lower = 0.0;  // both distances are nonnegative
  int iterations = 0;

  double gap() const { return std::max(best_value - lower, 0.0); }

  void offer(std::vector<double> delta, double value) {
    if (value < best_value) {
      best_value = value;
      best_delta = std::move(delta);
    }
  }
};

// One dimension (d = 2): bisection on [0, 1].
void bisect(const Objective& f, const OptimizerOptions& options, Search& search) {
  double lo = 0.0;
  double hi = 1.0;
  while (search.iterations < options.max_iterations && search.gap() > options.target_gap) {
    ++search.iterations;
    const double c = 0.5 * (lo + hi);
    const std::vector<double> x{c};
    std::vector<double> delta = to_delta(x);
    const Evaluation e = f(delta, true);
    const double g = e.gradient[0] - e.gradient[1];
    search.lower = std::max({search.lower, e.value - std::abs(g) * 0.5 * (hi - lo),
                             simplex_lower_bound(e, delta)});
    search.offer(std::move(delta), e.value);
    if (g > 0.0) {
      hi = c;
    } else if (g < 0.0) {
      lo = c;
    } else {
      search.lower = std::max(search.lower, e.value);
      break;
    }
    if (hi - lo < std::numeric_limits<double>::epsilon()) break;
  }
}

void ellipsoid(const Objective& f, std::size_t n, const OptimizerOptions& options, Search& search) {
  const double nd = static_cast<double>(n);
  std::vector<double> c(n, 1.0 / (nd + 1.0));
  std::vector<double> p(n * n, 0.0);  // ball of radius 1 contains the simplex
  for (std::size_t i = 0; i < n; ++i) p[i * n + i] = 1.0;
  std::vector<double> g(n), pg(n);

  while (search.iterations < options.max_iterations && search.gap() > options.target_gap) {
    ++search.iterations;
    double depth = 0.0;  // violation of the cutting constraint at c, if any
    if (!feasible(c)) {
      std::fill(g.begin(), g.end(), 0.0);
      const auto most_negative = std::min_element(c.begin(), c.end());
      const double excess = std::accumulate(c.begin(), c.end(), 0.0) - 1.0;
      if (-*most_negative >= excess) {
        g[static_cast<std::size_t>(most_negative - c.begin())] = -1.0;
        depth = -*most_negative;
      } else {
        std::fill(g.begin(), g.end(), 1.0);
        depth = excess;
      }
    } else {
      std::vector<double> delta = to_delta(c);
      const Evaluation e = f(delta, true);
      for (std::size_t i = 0; i < n; ++i) g[i] = e.gradient[i] - e.gradient[n];
      double gpg = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) gpg += g[i] * p[i * n + j] * g[j];
      }
      search.lower = std::max({search.lower, e.value - std::sqrt(std::max(gpg, 0.0)),
                               simplex_lower_bound(e, delta)});
      search.offer(std::move(delta), e.value);
      if (search.gap() <= options.target_gap) break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += p[i * n + j] * g[j];
      pg[i] = acc;
    }
    double gpg = 0.0;
    for (std::size_t i = 0; i < n; ++i) gpg += g[i] * pg[i];
    if (!(gpg > 1e-300)) break;  // zero subgradient or collapsed ellipsoid
    const double norm = std::sqrt(gpg);
    const double alpha = std::min(depth / norm, 0.999);
    const double tau = (1.0 + nd * alpha) / (nd + 1.0);
    const double sigma = 2.0 * (1.0 + nd * alpha) / ((nd + 1.0) * (1.0 + alpha));
    const double stretch = nd * nd * (1.0 - alpha * alpha) / (nd * nd - 1.0);
    for (std::size_t i = 0; i < n; ++i) c[i] -= tau * pg[i] / norm;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = stretch * (p[i * n + j] - sigma * pg[i] * pg[j] / gpg);
        p[i * n + j] = v;
        p[j * n + i] = v;
      }
    }
  }
}

}  // namespace

OptimizerError::OptimizerError(OptimizationResult best)
    : CoherenceError(ErrorCode::OptimizerDidNotConverge,
                     "optimality gap " + std::to_string(best.gap) + " after " +
                         std::to_string(best.iterations) + " iterations"),
      best_(std::move(best)) {}

OptimizationResult minimize_over_incoherent(const DensityMatrix& rho, DistanceObjective objective,
                                            const OptimizerOptions& options) {
  Objective f;
  if (objective == DistanceObjective::Fidelity) {
    f = FidelityObjective(rho);
  } else {
    f = TraceObjective(rho);
  }
  const std::size_t d = rho.dim();
  Search search;
  std::vector<double> dephased = rho.diagonal();
  for (double& w : dephased) w = std::max(w, 0.0);
  search.offer(dephased, f(dephased, false).value);

  if (d > 1 && max_off_diagonal(rho.matrix()) > 1e-12) {
    if (d == 2) {
      bisect(f, options, search);
    } else {
      ellipsoid(f, d - 1, options, search);
    }
  } else {
    search.lower = search.best_value;
  }

  const double total = std::accumulate(search.best_delta.begin(), search.best_delta.end(), 0.0);
  for (double& w : search.best_delta) w /= total;
  OptimizationResult result{IncoherentState(std::move(search.best_delta)),
                            std::max(search.best_value, 0.0), search.gap(), search.iterations};
  if (result.gap > options.accept_gap) throw OptimizerError(std::move(result));
  return result;
}

}  // namespace coherence
