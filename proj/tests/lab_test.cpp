#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "coherence/io.hpp"
#include "coherence/lab.hpp"
#include "coherence/protocols.hpp"
#include "test_support.hpp"

using namespace coherence;

namespace {

const double kH = 1.0 / std::sqrt(2.0);

CampaignConfig small_config(std::vector<MeasureId> measures, std::vector<Condition> conditions) {
  CampaignConfig cfg;
  cfg.measures = std::move(measures);
  cfg.conditions = std::move(conditions);
  return cfg;
}

const ConditionReport& find(const std::vector<ConditionReport>& reports, Condition c) {
  for (const auto& r : reports) {
    if (r.condition == c) return r;
  }
  throw std::logic_error("condition missing");
}

}  // namespace

TEST(Rng, PortableAndDeterministic) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    ASSERT_EQ(u, b.uniform());
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.02);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(RandomDensity, Examples) {
  const auto pure = random_density(2, 1, 8);
  EXPECT_NEAR((pure.matrix() * pure.matrix()).trace().real(), 1.0, 1e-10);
  const auto full = random_density(3, 3, 8);
  for (double l : eig_hermitian(full.matrix()).eigenvalues) EXPECT_GT(l, 0.0);
  EXPECT_EQ(random_density(4, 2, 77).matrix(), random_density(4, 2, 77).matrix());
  try {
    random_density(3, 4, 1);
    FAIL();
  } catch (const CoherenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidRank);
  }
  EXPECT_THROW(random_density(3, 0, 1), CoherenceError);
}

TEST(RandomDensity, RequestedRank) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng.index(4);
    const std::size_t rank = 1 + rng.index(d);
    const auto eig = testing_support::eigen_eigenvalues(testing_support::to_eigen(random_density(d, rank, rng.next()).matrix()));
    std::size_t nonzero = 0;
    for (double l : eig) nonzero += l > 1e-12 ? 1 : 0;
    ASSERT_EQ(nonzero, rank);
  }
}

TEST(RandomInstrument, SingleOperatorIsIsometryLike) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = random_incoherent_instrument(3, 1, seed);
    const auto& k = inst.kraus()[0];
    for (std::size_t c = 0; c < 3; ++c) {
      int nonzero = 0;
      for (std::size_t r = 0; r < 3; ++r) {
        if (std::abs(k(r, c)) > 1e-10) {
          ++nonzero;
          EXPECT_NEAR(std::abs(k(r, c)), 1.0, 1e-15);
        }
      }
      EXPECT_EQ(nonzero, 1);
    }
  }
}

TEST(RandomInstrument, TenThousandValidate) {
  Rng rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t d = 1 + rng.index(5);
    const std::size_t n = 1 + rng.index(5);
    const auto inst = random_incoherent_instrument(d, n, rng.next());
    const auto check = check_instrument(inst.kraus());
    ASSERT_TRUE(check.incoherent());
    worst = std::max(worst, check.completeness_max);
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(RandomInstrument, IncoherentInputsStayIncoherent) {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_incoherent_instrument(3, 2, rng.next());
    const auto delta = testing_support::random_incoherent(3, rng);
    for (const auto& o : apply_selective(inst, delta)) {
      if (o.state) ASSERT_TRUE(is_incoherent_state(*o.state, 1e-9));
    }
  }
  EXPECT_THROW(random_incoherent_instrument(3, 0, 1), CoherenceError);
}

TEST(ConditionNames, RoundTrip) {
  for (Condition c : kAllConditions) EXPECT_EQ(parse_condition(to_string(c)), c);
  EXPECT_EQ(to_string(Condition::C1Prime), "C1'");
  EXPECT_FALSE(parse_condition("C4").has_value());
}

TEST(CampaignConfig, Validation) {
  CampaignConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), CoherenceError);
  cfg = {};
  cfg.dims = {1};
  EXPECT_THROW(cfg.validate(), CoherenceError);
  cfg = {};
  cfg.violation_threshold = 0.0;
  EXPECT_THROW(cfg.validate(), CoherenceError);
}

TEST(CheckConditions, CounterexampleL2ViolatesC2b) {
  const auto inst = counterexample_instrument(CounterexampleParams(kH, kH));
  const auto reports = check_conditions(MeasureId::L2, counterexample_state(), inst,
                                        small_config({MeasureId::L2}, {Condition::C2b}), 0);
  const auto& r = find(reports, Condition::C2b);
  EXPECT_NEAR(r.lhs, 0.125, 1e-12);
  EXPECT_NEAR(r.rhs, 1.0 / 6.0, 1e-12);
  EXPECT_EQ(r.verdict, Verdict::Violated);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->kraus.size(), 2u);
}

TEST(CheckConditions, CounterexampleL1Holds) {
  const auto inst = counterexample_instrument(CounterexampleParams(kH, kH));
  const auto reports = check_conditions(MeasureId::L1, counterexample_state(), inst,
                                        small_config({MeasureId::L1}, {Condition::C2b}), 0);
  const auto& r = find(reports, Condition::C2b);
  EXPECT_EQ(r.verdict, Verdict::Holds);
  EXPECT_NEAR(r.residual, 0.5 - kH / 2.0, 1e-12);
  EXPECT_FALSE(r.witness.has_value());
}

TEST(CheckConditions, IdentityInstrumentRelEnt) {
  const auto inst = validate_instrument({ComplexMatrix::identity(3)});
  const auto rho = random_density(3, 2, 5);
  const auto reports = check_conditions(MeasureId::RelEnt, rho, inst,
                                        small_config({MeasureId::RelEnt}, {Condition::C2a, Condition::C2b}), 0);
  for (const auto& r : reports) {
    EXPECT_NEAR(r.residual, 0.0, 1e-10);
    EXPECT_EQ(r.verdict, Verdict::Holds);
  }
}

TEST(CheckConditions, C1PrimeVacuousBelowGate) {
  auto m = ComplexMatrix::diagonal(std::vector<double>{0.5, 0.5});
  m(0, 1) = m(1, 0) = 1e-4;
  const auto rho = DensityMatrix::validate(m);
  const auto inst = validate_instrument({ComplexMatrix::identity(2)});
  const auto reports = check_conditions(MeasureId::L1, rho, inst, small_config({MeasureId::L1}, {Condition::C1Prime}), 0);
  EXPECT_EQ(reports[0].verdict, Verdict::Holds);
  EXPECT_FALSE(reports[0].note.empty());
}

TEST(CheckConditions, DimensionMismatch) {
  const auto inst = validate_instrument({ComplexMatrix::identity(2)});
  try {
    check_conditions(MeasureId::L1, random_density(3, 3, 1), inst, CampaignConfig{}, 0);
    FAIL();
  } catch (const CoherenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Campaign, RelEntAndL1NeverViolate) {
  auto cfg = small_config({MeasureId::RelEnt, MeasureId::L1}, {kAllConditions.begin(), kAllConditions.end()});
  cfg.trials = 1000;
  cfg.seed = 2;
  const auto report = fuzz_campaign(cfg);
  EXPECT_TRUE(report.violations.empty());
  for (const auto& t : report.totals) EXPECT_EQ(t.holds, 1000u) << to_string(t.measure) << to_string(t.condition);
}

TEST(Campaign, L2C2bFindsInjectedWitness) {
  auto cfg = small_config({MeasureId::L2}, {Condition::C2b});
  cfg.trials = 1000;
  const auto report = fuzz_campaign(cfg);
  ASSERT_GE(report.tally(MeasureId::L2, Condition::C2b)->violated, 1u);
  EXPECT_EQ(report.violations.front().trial, 0u);
}

TEST(Campaign, ViolationsReplayStandalone) {
  auto cfg = small_config({MeasureId::L2, MeasureId::Fidelity}, {Condition::C2b, Condition::C3});
  cfg.trials = 150;
  cfg.seed = 5;
  const auto report = fuzz_campaign(cfg);
  ASSERT_FALSE(report.violations.empty());
  for (const auto& v : report.violations) {
    ASSERT_TRUE(v.witness.has_value());
    const auto inst = validate_instrument(v.witness->kraus, InstrumentMode::Selective);
    const auto replay = check_conditions(v.measure, v.witness->state, inst, small_config({v.measure}, {v.condition}),
                                         v.witness->mixture_seed);
    ASSERT_EQ(replay.size(), 1u);
    EXPECT_LT(replay[0].residual, -cfg.violation_threshold);
    EXPECT_EQ(replay[0].residual, v.residual);
    EXPECT_EQ(replay[0].verdict, Verdict::Violated);
  }
}

TEST(Campaign, IndependentOfWorkerCount) {
  CampaignConfig cfg;
  cfg.trials = 40;
  cfg.seed = 11;
  const auto serial = io::dump(io::to_json(fuzz_campaign(cfg, 1)));
  const auto parallel = io::dump(io::to_json(fuzz_campaign(cfg, 4)));
  EXPECT_EQ(serial, parallel);
  cfg.trials = 1;
  EXPECT_EQ(io::dump(io::to_json(fuzz_campaign(cfg))), io::dump(io::to_json(fuzz_campaign(cfg))));
}

TEST(Io, MatrixAndStateRoundTripBitExact) {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rho = random_density(2 + rng.index(3), 2, rng.next());
    const auto text = io::dump(io::to_json(rho));
    const auto back = io::density_from_json(io::Json::parse(text));
    ASSERT_EQ(back.matrix(), rho.matrix());
    const auto psi = random_state_vector(3, rng);
    const auto v = io::state_vector_from_json(io::Json::parse(io::dump(io::to_json(psi))));
    for (std::size_t i = 0; i < 3; ++i) ASSERT_EQ(v[i], psi[i]);
  }
}

TEST(Io, ChannelRoundTrip) {
  const auto inst = random_incoherent_instrument(3, 3, 99);
  const auto file = io::channel_from_json(io::Json::parse(io::dump(io::to_json(inst))));
  ASSERT_EQ(file.kraus.size(), 3u);
  for (std::size_t n = 0; n < 3; ++n) EXPECT_EQ(file.kraus[n], inst.kraus()[n]);
  EXPECT_EQ(file.mode, InstrumentMode::NonSelective);
}

TEST(Io, ParseErrors) {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const CoherenceError& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of([] { io::density_from_json(io::Json::parse(R"({"matrix": [[[1,0]]]})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::density_from_json(io::Json::parse(R"({"dim": 2, "matrix": [[[1,0]]]})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::matrix_from_json(io::Json::parse(R"([[[1,0],[0,0]],[[0,0]]])")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::channel_from_json(io::Json::parse(R"({"kraus": [], "mode": "A"})")); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::config_from_json(io::Json::parse(R"({"measures": ["L3"]})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::config_from_json(io::Json::parse(R"({"trials": 0})")); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { io::load_json("/nonexistent/file.json"); }), ErrorCode::ParseError);
}

TEST(Io, ConfigRoundTrip) {
  const auto cfg = io::config_from_json(io::Json::parse(
      R"({"dims": [2, 3], "trials": 7, "seed": 18446744073709551615, "measures": ["L1", "TRACE_NORM"],
          "conditions": ["C1'", "C3"], "violation_threshold": 1e-9, "max_kraus": 4})"));
  EXPECT_EQ(cfg.seed, 18446744073709551615ULL);
  EXPECT_EQ(cfg.conditions[0], Condition::C1Prime);
  const auto again = io::config_from_json(io::to_json(cfg));
  EXPECT_EQ(io::to_json(again), io::to_json(cfg));
}

TEST(Io, ReportCsv) {
  auto cfg = small_config({MeasureId::L2}, {Condition::C2b});
  cfg.trials = 3;
  const auto csv = io::totals_csv(fuzz_campaign(cfg));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "measure,condition,holds,violated,inconclusive");
  EXPECT_NE(csv.find("L2,C2b,"), std::string::npos);
}
