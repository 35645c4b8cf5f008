#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "coherence/measures.hpp"
#include "coherence/protocols.hpp"
#include "test_support.hpp"

using namespace coherence;

namespace {

const double kH = 1.0 / std::sqrt(2.0);

DensityMatrix plus_state() { return StateVector({kH, kH}).density(); }

DensityMatrix permuted(const DensityMatrix& rho, const std::vector<std::size_t>& perm) {
  ComplexMatrix p(perm.size(), perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) p(k, perm[k]) = 1.0;
  return DensityMatrix::validate(conjugate_by(p, rho.matrix()));
}

}  // namespace

TEST(MeasureId, NamesRoundTrip) {
  for (MeasureId id : kAllMeasures) EXPECT_EQ(parse_measure(to_string(id)), id);
  EXPECT_FALSE(parse_measure("l1").has_value());
}

TEST(RelEnt, MaximallyCoherent) {
  for (std::size_t d : {2, 4, 8}) {
    EXPECT_NEAR(c_rel_ent(max_coherent_state(d).density()).value, std::log2(static_cast<double>(d)), 1e-10);
  }
}

TEST(RelEnt, IncoherentAndCounterexampleState) {
  EXPECT_NEAR(c_rel_ent(DensityMatrix::validate(ComplexMatrix::diagonal(std::vector<double>{0.1, 0.9}))).value,
              0.0, 1e-12);
  const auto rho = counterexample_state();
  const auto r = c_rel_ent(rho);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  ASSERT_TRUE(r.minimizer.has_value());
  EXPECT_NEAR(r.minimizer->weights()[1], 0.5, 1e-15);
  // Eigenvalues {1/2, 1/2, 0} give S(rho) = 1.
  EXPECT_NEAR(von_neumann_entropy(rho), 1.0, 1e-12);
}

TEST(RelEnt, EqualsRelativeEntropyToDephased) {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng.index(3);
    const auto rho = random_density(d, 1 + rng.index(d), rng.next());
    const double closed = c_rel_ent(rho).value;
    ASSERT_NEAR(closed, relative_entropy(rho, dephase(rho)), 1e-9);
    // No incoherent state does better: compare against random diagonal states.
    for (int k = 0; k < 5; ++k) {
      ASSERT_LE(closed, relative_entropy(rho, testing_support::random_incoherent(d, rng)) + 1e-9);
    }
  }
}

TEST(L1, Examples) {
  for (std::size_t d : {2, 3, 5}) {
    EXPECT_NEAR(c_l1(max_coherent_state(d).density()).value, static_cast<double>(d - 1), 1e-12);
  }
  EXPECT_EQ(c_l1(DensityMatrix::validate(ComplexMatrix::diagonal(std::vector<double>{0.5, 0.5}))).value, 0.0);
  EXPECT_NEAR(c_l1(counterexample_state()).value, 0.5, 1e-15);
}

TEST(L2, Examples) {
  const auto r = c_l2(counterexample_state());
  EXPECT_NEAR(r.value, 0.125, 1e-15);
  EXPECT_TRUE(r.not_a_monotone);
  EXPECT_EQ(c_l2(DensityMatrix::validate(ComplexMatrix::diagonal(std::vector<double>{0.5, 0.5}))).value, 0.0);
  EXPECT_NEAR(c_l2(plus_state()).value, 0.5, 1e-15);
}

TEST(Fidelity, UhlmannAgainstEigen) {
  Rng rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng.index(3);
    const auto rho = random_density(d, 1 + rng.index(d), rng.next());
    const auto sigma = random_density(d, 1 + rng.index(d), rng.next());
    const double sqrt_f = testing_support::eigen_root_fidelity(testing_support::to_eigen(rho.matrix()),
                                                               testing_support::to_eigen(sigma.matrix()));
    // Rank-deficient pairs put exact zeros in the spectrum; roundoff there
    // enters through a square root, so agreement is limited to ~sqrt(eps).
    ASSERT_NEAR(fidelity(rho, sigma), sqrt_f * sqrt_f, 1e-8);
    ASSERT_NEAR(fidelity(rho, sigma), fidelity(sigma, rho), 1e-8);
  }
}

TEST(Optimizer, DiagonalInputIsExact) {
  const auto delta = DensityMatrix::validate(ComplexMatrix::diagonal(std::vector<double>{0.2, 0.5, 0.3}));
  for (auto objective : {DistanceObjective::Fidelity, DistanceObjective::Trace}) {
    const auto r = minimize_over_incoherent(delta, objective);
    EXPECT_NEAR(r.value, 0.0, 1e-12);
    EXPECT_NEAR(r.minimizer.weights()[1], 0.5, 1e-12);
  }
}

TEST(Optimizer, PlusStateExamples) {
  const auto tr = minimize_over_incoherent(plus_state(), DistanceObjective::Trace);
  EXPECT_NEAR(tr.value, 1.0, 1e-9);
  EXPECT_NEAR(tr.minimizer.weights()[0], 0.5, 1e-6);
  EXPECT_NEAR(testing_support::oracle_trace(plus_state()), 1.0, 1e-9);

  const auto fi = minimize_over_incoherent(plus_state(), DistanceObjective::Fidelity);
  EXPECT_NEAR(fi.value, 1.0 - std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(testing_support::oracle_fidelity(plus_state()), 1.0 - std::sqrt(0.5), 1e-9);
}

TEST(Optimizer, BudgetExhaustionCarriesBestIterate) {
  OptimizerOptions opts;
  opts.max_iterations = 3;
  opts.target_gap = 0.0;
  opts.accept_gap = 0.0;
  const auto rho = random_density(4, 4, 91);
  try {
    minimize_over_incoherent(rho, DistanceObjective::Trace, opts);
    FAIL();
  } catch (const OptimizerError& e) {
    EXPECT_EQ(e.code(), ErrorCode::OptimizerDidNotConverge);
    EXPECT_EQ(e.best().minimizer.dim(), 4u);
    EXPECT_LE(e.best().value, trace_distance(rho, dephase(rho)) + 1e-12);
  }
}

TEST(CFidelity, Examples) {
  EXPECT_NEAR(c_fidelity(DensityMatrix::validate(ComplexMatrix::diagonal(std::vector<double>{0.3, 0.7}))).value,
              0.0, 1e-12);
  EXPECT_NEAR(c_fidelity(plus_state()).value, 1.0 - kH, 1e-9);
  const auto psi3 = max_coherent_state(3).density();
  const auto r = c_fidelity(psi3);
  EXPECT_NEAR(r.value, testing_support::oracle_fidelity(psi3), 1e-6);
  // Pure state: min over delta of 1 - sqrt(sum delta_i / 3) is 1 - sqrt(1/3).
  EXPECT_NEAR(r.value, 1.0 - std::sqrt(1.0 / 3.0), 1e-9);
}

TEST(CTrace, Examples) {
  const auto inc = c_trace(DensityMatrix::validate(ComplexMatrix::diagonal(std::vector<double>{0.3, 0.7})));
  EXPECT_NEAR(inc.value, 0.0, 1e-12);
  EXPECT_NEAR(*inc.dephased_value, 0.0, 1e-15);
  const auto plus = c_trace(plus_state());
  EXPECT_NEAR(plus.value, 1.0, 1e-9);
  EXPECT_NEAR(*plus.dephased_value, 1.0, 1e-12);
}

TEST(CTraceProperty, NeverAboveDephasedValue) {
  Rng rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = random_density(3, 1 + rng.index(3), rng.next());
    const auto r = c_trace(rho);
    ASSERT_LE(r.value, *r.dephased_value + 1e-6);
    ASSERT_LE(*r.optimizer_residual, 1e-6);
  }
}

TEST(OptimizerProperty, MatchesGridOracle) {
  Rng rng(74);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + rng.index(2);
    const auto rho = random_density(d, 1 + rng.index(d), rng.next());
    ASSERT_NEAR(c_trace(rho).value, testing_support::oracle_trace(rho), 1e-6) << "trial " << trial;
    ASSERT_NEAR(c_fidelity(rho).value, testing_support::oracle_fidelity(rho), 1e-6) << "trial " << trial;
  }
}

TEST(MeasureProperty, ZeroOnIncoherentStates) {
  Rng rng(75);
  for (int trial = 0; trial < 100; ++trial) {
    const auto delta = testing_support::random_incoherent(2 + rng.index(3), rng);
    for (MeasureId id : kAllMeasures) ASSERT_LE(measure(id, delta).value, 1e-9) << to_string(id);
  }
}

TEST(MeasureProperty, FaithfulAboveOffDiagonalGate) {
  Rng rng(76);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng.index(3);
    const auto rho = random_density(d, 1 + rng.index(d), rng.next());
    const double c = max_off_diagonal(rho.matrix());
    if (c <= kFaithfulnessGate) continue;
    ++checked;
    for (MeasureId id : kAllMeasures) {
      const double v = measure(id, rho).value;
      ASSERT_GE(v, faithfulness_floor(id, c) - 1e-9) << to_string(id);
      ASSERT_GT(v, 0.0) << to_string(id);
    }
  }
  EXPECT_GT(checked, 150);
}

TEST(MeasureProperty, FaithfulnessFloorsAreTightEnough) {
  // The fidelity floor c^2 / 2 is the reason the faithfulness check cannot use
  // a flat 1e-6: at c just above the gate the fidelity measure itself is
  // below 1e-6.
  const double c = 1.1e-3;
  const double a = 0.5;
  const auto rho = DensityMatrix::validate(ComplexMatrix::from_rows({{a, c}, {c, 1.0 - a}}));
  const double v = c_fidelity(rho).value;
  EXPECT_LT(v, 1e-6);
  EXPECT_GE(v, faithfulness_floor(MeasureId::Fidelity, c) - 1e-12);
}

TEST(MeasureProperty, ConvexUnderMixing) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + rng.index(3);
    const std::size_t n = 2 + rng.index(3);
    const auto w = random_dirichlet(n, rng);
    std::vector<DensityMatrix> states;
    ComplexMatrix mixed(d, d);
    for (std::size_t k = 0; k < n; ++k) {
      states.push_back(random_density(d, 1 + rng.index(d), rng.next()));
      mixed += w[k] * states.back().matrix();
    }
    const auto mix = DensityMatrix::validate(mixed);
    for (MeasureId id : kAllMeasures) {
      double avg = 0.0;
      for (std::size_t k = 0; k < n; ++k) avg += w[k] * measure(id, states[k]).value;
      ASSERT_GE(avg - measure(id, mix).value, -1e-8) << to_string(id) << " trial " << trial;
    }
  }
}

TEST(MeasureProperty, BoundChain) {
  Rng rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng.index(5);
    const auto rho = random_density(d, 1 + rng.index(d), rng.next());
    const double c = c_rel_ent(rho).value;
    const double s_diag = von_neumann_entropy(dephase(rho));
    ASSERT_GE(c, 0.0);
    ASSERT_LE(c, s_diag + 1e-12);
    ASSERT_LE(s_diag, std::log2(static_cast<double>(d)) + 1e-12);
  }
}

TEST(MeasureProperty, PermutationInvariance) {
  Rng rng(79);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.index(3);
    const auto rho = random_density(d, 1 + rng.index(d), rng.next());
    std::vector<std::size_t> perm(d);
    for (std::size_t i = 0; i < d; ++i) perm[i] = i;
    for (std::size_t i = d; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
    const auto p = permuted(rho, perm);
    for (MeasureId id : kAllMeasures) {
      ASSERT_NEAR(measure(id, rho).value, measure(id, p).value, 1e-10) << to_string(id);
    }
  }
}
