// Copyright 2026 The Rugbyrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rugbyrank/model.h"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.h"

namespace rugbyrank {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Parameters TableMeans(int teams = 2) {
  Parameters p = Parameters::Unit(teams);
  p.rho_n = 0.448;
  p.rho_d = 0.212;
  p.tau_b = 0.042;
  p.tau_z = 2.801;
  p.kappa = 1.113;
  return p;
}

oracle::Structural AsOracle(const Parameters& p) {
  return {p.rho_n, p.rho_d, p.tau_b, p.tau_z, p.kappa};
}

Parameters RandomParams(std::mt19937& rng, int teams, VariantConfig v = {}) {
  std::uniform_real_distribution<double> log_u(-1.5, 1.5);
  Parameters p = Parameters::Unit(teams, v);
  for (double& s : p.strengths) s = std::exp(log_u(rng));
  p.rho_n = std::exp(log_u(rng));
  p.rho_d = std::exp(log_u(rng));
  p.tau_b = std::exp(log_u(rng));
  p.tau_z = std::exp(log_u(rng));
  p.kappa = std::exp(0.3 * log_u(rng));
  p.extra.tau = std::exp(log_u(rng));
  for (double& d : p.extra.delta) d = std::exp(log_u(rng));
  for (double& s : p.extra.home_strengths) s = std::exp(log_u(rng));
  for (double& s : p.extra.away_strengths) s = std::exp(log_u(rng));
  if (v.home_model == HomeModel::kTeamSpecific) {
    for (int i = 0; i < teams; ++i) {
      p.strengths[i] =
          std::sqrt(p.extra.home_strengths[i] * p.extra.away_strengths[i]);
    }
  }
  return p;
}

TEST(ResultWeightsTest, TableMeansAtUnitStrength) {
  Parameters p = TableMeans();
  p.kappa = 1.0;
  const auto w = ResultWeights(1, 1, p, true);
  const std::array<double, 5> want = {1, 0.448, 0.212, 0.448, 1};
  for (int r = 0; r < 5; ++r) EXPECT_NEAR(w[r], want[r], 1e-15);
}

TEST(ResultWeightsTest, HomeWideWeightIsKappaToTheFourth) {
  const Parameters p = TableMeans();
  EXPECT_NEAR(ResultWeights(1, 1, p, true)[0], 1.5345486353609998, 1e-12);
  // Neutral venue drops kappa.
  EXPECT_NEAR(ResultWeights(1, 1, p, false)[0], 1.0, 1e-15);
}

TEST(ResultWeightsTest, ReflectionSymmetryWithoutHomeAdvantage) {
  Parameters p = TableMeans();
  p.kappa = 1.0;
  const auto w = ResultWeights(2.5, 2.5, p, true);
  EXPECT_DOUBLE_EQ(w[0], w[4]);
  EXPECT_DOUBLE_EQ(w[1], w[3]);
}

TEST(ResultWeightsTest, OverflowIsReported) {
  const Parameters p = TableMeans();
  EXPECT_THROW(ResultWeights(1e100, 1.0, p, true), Error);
  // The same match is fine in the log domain.
  Parameters q = Parameters::Unit(2);
  q.strengths = {1e100, 1.0};
  const OutcomeDistribution d = Distribution(q, 0, 1, Venue::kHomeGround);
  EXPECT_NEAR(d.result[0] + d.result[1], 1.0, 1e-12);
}

TEST(ProbsTest, MatchesOracleEnumeration) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const Parameters p = RandomParams(rng, 2);
    const auto s = AsOracle(p);
    const auto want = oracle::Joint(p.strengths[0], p.strengths[1], s);
    const OutcomeDistribution d = Distribution(p, 0, 1, Venue::kHomeGround);
    for (int r = 0; r < 5; ++r) {
      for (int t = 0; t < 4; ++t) {
        EXPECT_NEAR(d.Joint(kAllResults[r], kAllTries[t]), want[r * 4 + t],
                    1e-13);
      }
    }
    const auto rp = ResultProbs(p.strengths[0], p.strengths[1], p, true);
    const auto tp = TryProbs(p.strengths[0], p.strengths[1], p, true);
    for (int r = 0; r < 5; ++r) EXPECT_NEAR(rp[r], d.result[r], 1e-14);
    for (int t = 0; t < 4; ++t) EXPECT_NEAR(tp[t], d.tries[t], 1e-14);
  }
}

TEST(ProbsTest, BothBonusAtMeanStrength) {
  Parameters p = TableMeans();
  p.kappa = 1.0;
  const auto t = TryProbs(1, 1, p, true);
  EXPECT_NEAR(t[0], 0.042 / 4.843, 1e-15);
  EXPECT_NEAR(t[0], 0.008672310551311171, 1e-15);
}

TEST(ProbsTest, NarrowProbabilityClosedForm) {
  Parameters p = TableMeans();
  p.kappa = 1.0;
  const auto r = ResultProbs(1, 1, p, true);
  EXPECT_NEAR(r[1] + r[3], 2 * 0.448 / (2 + 2 * 0.448 + 0.212), 1e-15);
  EXPECT_NEAR(r[2], 0.212 / (2 + 2 * 0.448 + 0.212), 1e-15);
}

TEST(ProbsTest, BlocksSumToOneForAllVariants) {
  std::mt19937 rng(2);
  for (TryModel tm :
       {TryModel::kOppositionDependent, TryModel::kOppositionIndependent,
        TryModel::kOffensiveDefensive}) {
    for (HomeModel hm : {HomeModel::kSingleKappa, HomeModel::kTeamSpecific,
                         HomeModel::kNone}) {
      for (int trial = 0; trial < 50; ++trial) {
        const Parameters p = RandomParams(rng, 4, {tm, hm});
        for (Venue v : {Venue::kHomeGround, Venue::kNeutral}) {
          const OutcomeDistribution d = Distribution(p, 1, 3, v);
          double sr = 0, st = 0;
          for (double x : d.result) {
            EXPECT_GE(x, 0);
            EXPECT_LE(x, 1);
            sr += x;
          }
          for (double x : d.tries) st += x;
          EXPECT_NEAR(sr, 1, 1e-12);
          EXPECT_NEAR(st, 1, 1e-12);
        }
      }
    }
  }
}

TEST(ProbsTest, OppositionIndependentIsProductOfBernoullis) {
  Parameters p = Parameters::Unit(
      2, {TryModel::kOppositionIndependent, HomeModel::kSingleKappa});
  p.strengths = {1.7, 0.6};
  p.extra.tau = 0.35;
  p.kappa = 1.2;
  const auto t = TryProbs(1.7, 0.6, p, true);
  const double wh = 0.35 * 1.7 * 1.2, wa = 0.35 * 0.6 / 1.2;
  const double ph = wh / (1 + wh), pa = wa / (1 + wa);
  EXPECT_NEAR(t[0], ph * pa, 1e-15);
  EXPECT_NEAR(t[1], ph * (1 - pa), 1e-15);
  EXPECT_NEAR(t[2], (1 - ph) * pa, 1e-15);
  EXPECT_NEAR(t[3], (1 - ph) * (1 - pa), 1e-15);
}

TEST(ProbsTest, OffensiveDefensiveDegeneratesToDefault) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Parameters def = RandomParams(rng, 3);
    def.tau_b = 1.0 / def.tau_z;
    Parameters od = def;
    od.variant.try_model = TryModel::kOffensiveDefensive;
    od.extra.delta.assign(3, std::sqrt(def.tau_z));
    const auto a = Distribution(def, 0, 2, Venue::kHomeGround);
    const auto b = Distribution(od, 0, 2, Venue::kHomeGround);
    for (int t = 0; t < 4; ++t) EXPECT_NEAR(a.tries[t], b.tries[t], 1e-14);
    for (int r = 0; r < 5; ++r) EXPECT_NEAR(a.result[r], b.result[r], 1e-14);
  }
}

TEST(ProbsTest, OffensiveDefensiveWithCommonDeltaMatchesSomeDefault) {
  // delta_i = delta for all i gives both ~ pi_i pi_j / delta^2 and zero ~
  // delta^2: the default model with tau_b = 1/delta^2, tau_z = delta^2.
  std::mt19937 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Parameters od = RandomParams(
        rng, 3, {TryModel::kOffensiveDefensive, HomeModel::kSingleKappa});
    const double delta = od.extra.delta[0];
    od.extra.delta.assign(3, delta);
    Parameters def = od;
    def.variant.try_model = TryModel::kOppositionDependent;
    def.tau_b = 1 / (delta * delta);
    def.tau_z = delta * delta;
    const auto a = Distribution(def, 2, 1, Venue::kHomeGround);
    const auto b = Distribution(od, 2, 1, Venue::kHomeGround);
    for (int t = 0; t < 4; ++t) EXPECT_NEAR(a.tries[t], b.tries[t], 1e-14);
  }
}

TEST(ProbsTest, HomeWideIncreasesWithHomeStrength) {
  const Parameters p = TableMeans();
  double last = 0;
  for (double pi = 0.1; pi < 20; pi *= 1.3) {
    const double v = ResultProbs(pi, 1.0, p, true)[0];
    EXPECT_GT(v, last);
    last = v;
  }
}

TEST(ExpectedPointsTest, MeanTeamsMatchEnumeration) {
  Parameters p = TableMeans();
  p.kappa = 1.0;
  const auto [h, a] = ExpectedPoints(p, 0, 1, Venue::kHomeGround);
  EXPECT_NEAR(h, 2.359300039250483, 1e-12);
  EXPECT_NEAR(a, 2.359300039250483, 1e-12);
  // Result part 2.144, bonus part 0.215.
  const auto r = ResultProbs(1, 1, p, true);
  EXPECT_NEAR(4 * (r[0] + r[1]) + 2 * r[2] + r[3], 6.664 / 3.108, 1e-12);
}

TEST(ExpectedPointsTest, AgreesWithOracleOnRandomPairs) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Parameters p = RandomParams(rng, 2);
    const auto want =
        oracle::ExpectedPoints(p.strengths[0], p.strengths[1], AsOracle(p));
    const auto [h, a] = ExpectedPoints(p, 0, 1, Venue::kHomeGround);
    EXPECT_NEAR(h, want[0], 1e-12);
    EXPECT_NEAR(a, want[1], 1e-12);
  }
}

TEST(ExpectedPointsTest, DominantHomeTeamApproachesFivePoints) {
  Parameters p = TableMeans();
  p.strengths = {1e8, 1.0};
  const auto [h, a] = ExpectedPoints(p, 0, 1, Venue::kHomeGround);
  EXPECT_GE(h, 4.0);
  EXPECT_NEAR(h, 5.0, 1e-6);
}

TEST(ExpectedPointsTest, SwapWithoutHomeAdvantage) {
  Parameters p = TableMeans();
  p.kappa = 1.0;
  p.strengths = {1.8, 0.7};
  const auto [h1, a1] = ExpectedPoints(p, 0, 1, Venue::kHomeGround);
  const auto [h2, a2] = ExpectedPoints(p, 1, 0, Venue::kHomeGround);
  EXPECT_NEAR(h1, a2, 1e-14);
  EXPECT_NEAR(a1, h2, 1e-14);
}

TEST(InterpretTest, TableMeans) {
  const StructuralInterpretation s = InterpretStructural(TableMeans());
  EXPECT_NEAR(s.with_home_advantage.wide, 0.6543924362354167, 1e-12);
  EXPECT_NEAR(s.with_home_advantage.home_away_win_ratio, 2.2038212684221508,
              1e-12);
  EXPECT_NEAR(s.with_home_advantage.both_bonus, 0.008651815241379463, 1e-12);
  EXPECT_NEAR(s.neutral.both_bonus, 0.008672310551311171, 1e-12);
  EXPECT_NEAR(s.neutral.home_away_win_ratio, 1.0, 1e-14);
}

TEST(InterpretTest, UniformWeights) {
  const Parameters p = Parameters::Unit(2);
  const StructuralInterpretation s = InterpretStructural(p);
  EXPECT_NEAR(s.with_home_advantage.draw, 0.2, 1e-15);
  EXPECT_NEAR(s.with_home_advantage.wide, 0.4, 1e-15);
  EXPECT_NEAR(s.with_home_advantage.zero_bonus, 0.25, 1e-15);
}

TEST(GaugeTest, IdentityAtOne) {
  std::mt19937 rng(6);
  const Parameters p = RandomParams(rng, 3);
  const Parameters q = GaugeTransform(p, 1.0);
  EXPECT_EQ(p.strengths, q.strengths);
  EXPECT_EQ(p.rho_n, q.rho_n);
  EXPECT_EQ(p.tau_z, q.tau_z);
}

TEST(GaugeTest, PreservesEveryJointProbabilityAllVariants) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> log_c(std::log(0.1), std::log(10.0));
  for (TryModel tm :
       {TryModel::kOppositionDependent, TryModel::kOppositionIndependent,
        TryModel::kOffensiveDefensive}) {
    for (HomeModel hm : {HomeModel::kSingleKappa, HomeModel::kTeamSpecific,
                         HomeModel::kNone}) {
      for (int trial = 0; trial < 30; ++trial) {
        const Parameters p = RandomParams(rng, 4, {tm, hm});
        const Parameters q = GaugeTransform(p, std::exp(log_c(rng)));
        for (Venue v : {Venue::kHomeGround, Venue::kNeutral}) {
          const auto a = Distribution(p, 3, 0, v);
          const auto b = Distribution(q, 3, 0, v);
          for (ResultOutcome r : kAllResults) {
            for (TryOutcome t : kAllTries) {
              EXPECT_NEAR(a.Joint(r, t), b.Joint(r, t), 1e-12);
            }
          }
        }
      }
    }
  }
}

TEST(GaugeTest, MatchesOracleForDefaultVariant) {
  std::mt19937 rng(8);
  const Parameters p = RandomParams(rng, 2);
  const Parameters q = GaugeTransform(p, 2.0);
  const auto a = oracle::Joint(p.strengths[0], p.strengths[1], AsOracle(p));
  const auto b = oracle::Joint(q.strengths[0], q.strengths[1], AsOracle(q));
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
}

TEST(GaugeTest, Composition) {
  std::mt19937 rng(9);
  const Parameters p = RandomParams(rng, 3);
  const Parameters ab = GaugeTransform(GaugeTransform(p, 1.7), 0.4);
  const Parameters direct = GaugeTransform(p, 1.7 * 0.4);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(ab.strengths[i], direct.strengths[i],
                1e-14 * direct.strengths[i]);
  }
  EXPECT_NEAR(ab.rho_n, direct.rho_n, 1e-14 * direct.rho_n);
  EXPECT_NEAR(ab.tau_b, direct.tau_b, 1e-14 * direct.tau_b);
  EXPECT_NEAR(ab.tau_z, direct.tau_z, 1e-14 * direct.tau_z);
  EXPECT_EQ(ab.rho_d, p.rho_d);
  EXPECT_EQ(ab.kappa, p.kappa);
}

TEST(GeneralizedMeanTest, Basics) {
  EXPECT_DOUBLE_EQ(GeneralizedMean(std::vector<double>{1, 1, 1}), 1.0);
  EXPECT_NEAR(SolveScale(std::vector<double>{1, 1, 1}), 1.0, 1e-12);
  for (double x : {0.01, 0.3, 2.0, 17.0, 1e4}) {
    EXPECT_NEAR(GeneralizedMean(std::vector<double>{x, 1 / x}), 1.0, 1e-15);
    EXPECT_NEAR(SolveScale(std::vector<double>{x, 1 / x}), 1.0, 1e-12);
  }
}

TEST(GeneralizedMeanTest, ClosedFormScale) {
  // 2*3c/(1+3c) + 2c/(1+c) = 2  <=>  3c^2 = 1.
  EXPECT_NEAR(SolveScale(std::vector<double>{3, 1}), 1 / std::sqrt(3.0), 1e-12);
}

TEST(GeneralizedMeanTest, InfiniteStrengthStaysFinite) {
  const std::vector<double> s = {kInf, 1.0, 0.5, 2.0};
  EXPECT_TRUE(std::isfinite(GeneralizedMean(s)));
  const double c = SolveScale(s);
  std::vector<double> scaled = s;
  for (double& x : scaled) x *= c;
  EXPECT_NEAR(GeneralizedMean(scaled), 1.0, 1e-12);
}

TEST(GeneralizedMeanTest, NoRoot) {
  EXPECT_THROW(SolveScale(std::vector<double>{0, 0, 0}), Error);
  EXPECT_THROW(SolveScale(std::vector<double>{kInf, kInf, 1}), Error);
}

TEST(GeneralizedMeanTest, ScaleEquivariance) {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(5);
    for (double& x : s) x = std::exp(u(rng));
    const double c = std::exp(u(rng));
    std::vector<double> cs = s;
    for (double& x : cs) x *= c;
    EXPECT_NEAR(SolveScale(cs), SolveScale(s) / c, 1e-11 * SolveScale(s) / c);
  }
}

TEST(ArithmeticNormalizeTest, Basics) {
  const auto a = ArithmeticNormalize(std::vector<double>{2, 4});
  EXPECT_NEAR(a[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(a[1], 4.0 / 3, 1e-15);
  const auto b = ArithmeticNormalize(std::vector<double>{0.5, 1.5, 1.0});
  EXPECT_NEAR(b[0], 0.5, 1e-15);
  EXPECT_NEAR(b[2], 1.0, 1e-15);
  EXPECT_THROW(ArithmeticNormalize(std::vector<double>{1, kInf}), Error);
}

TEST(LayoutTest, LogRoundTripAllVariants) {
  std::mt19937 rng(11);
  for (TryModel tm :
       {TryModel::kOppositionDependent, TryModel::kOppositionIndependent,
        TryModel::kOffensiveDefensive}) {
    for (HomeModel hm : {HomeModel::kSingleKappa, HomeModel::kTeamSpecific,
                         HomeModel::kNone}) {
      const Parameters p = RandomParams(rng, 3, {tm, hm});
      const ParamLayout layout(3, {tm, hm});
      const Parameters q = layout.FromLog(layout.ToLog(p));
      const auto a = Distribution(p, 0, 1, Venue::kHomeGround);
      const auto b = Distribution(q, 0, 1, Venue::kHomeGround);
      for (int r = 0; r < 5; ++r) EXPECT_NEAR(a.result[r], b.result[r], 1e-14);
      for (int t = 0; t < 4; ++t) EXPECT_NEAR(a.tries[t], b.tries[t], 1e-14);
    }
  }
}

TEST(LayoutTest, ParseNames) {
  EXPECT_EQ(ParseTryModel("offensive-defensive"),
            TryModel::kOffensiveDefensive);
  EXPECT_EQ(ParseHomeModel("none"), HomeModel::kNone);
  EXPECT_THROW(ParseTryModel("bogus"), Error);
}

TEST(ParametersTest, Validate) {
  Parameters p = Parameters::Unit(2);
  p.rho_n = -1;
  EXPECT_THROW(p.Validate(), Error);
  p = Parameters::Unit(2, {TryModel::kOffensiveDefensive, HomeModel::kNone});
  p.extra.delta.pop_back();
  EXPECT_THROW(p.Validate(), Error);
}

}  // namespace
}  // namespace rugbyrank
