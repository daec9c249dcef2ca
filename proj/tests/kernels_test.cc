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

#include "rugbyrank/kernels.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rugbyrank {
namespace {

using testing::ReferenceTruth;
using testing::SampleRoundRobin;

std::vector<double> Perturbed(const ParamLayout& layout, uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0, 0.5);
  std::vector<double> theta(layout.size(), 0.0);
  for (int k = 0; k < layout.size(); ++k) {
    if (layout.active(k)) theta[k] = n(rng);
  }
  return theta;
}

class KernelVariantTest : public ::testing::TestWithParam<VariantConfig> {};

TEST_P(KernelVariantTest, ParallelMatchesReference) {
  const VariantConfig v = GetParam();
  const Parameters truth = ReferenceTruth(7, v);
  const OutcomeCounts counts = SampleRoundRobin(truth, 2, 21, 5);
  const ParamLayout layout(7, v);
  const Design design = BuildDesign(layout, counts);
  for (uint32_t seed = 1; seed <= 5; ++seed) {
    const auto theta = Perturbed(layout, seed);
    const Evaluation ref = EvaluateReference(design, theta, true);
    const Evaluation par = EvaluateParallel(design, theta, true);
    const double scale = 1 + std::abs(ref.log_likelihood);
    EXPECT_NEAR(par.log_likelihood, ref.log_likelihood, 1e-12 * scale);
    ASSERT_EQ(par.gradient.size(), ref.gradient.size());
    for (size_t k = 0; k < ref.gradient.size(); ++k) {
      EXPECT_NEAR(par.gradient[k], ref.gradient[k], 1e-10);
    }
    ASSERT_EQ(par.hessian.size(), ref.hessian.size());
    for (size_t k = 0; k < ref.hessian.size(); ++k) {
      EXPECT_NEAR(par.hessian[k], ref.hessian[k], 1e-10);
    }
  }
}

TEST_P(KernelVariantTest, GradientMatchesFiniteDifference) {
  const VariantConfig v = GetParam();
  const Parameters truth = ReferenceTruth(5, v);
  const OutcomeCounts counts = SampleRoundRobin(truth, 2, 22, 4);
  const ParamLayout layout(5, v);
  const Design design = BuildDesign(layout, counts);
  const auto theta = Perturbed(layout, 9);
  const Evaluation ev = EvaluateParallel(design, theta, true);
  const int n = layout.size();
  auto f = [&](const std::vector<double>& x) {
    return EvaluateReference(design, x, false).log_likelihood;
  };
  for (int k = 0; k < n; ++k) {
    std::vector<double> x = theta;
    const double h = 1e-5;
    x[k] += h;
    const double up = f(x);
    x[k] -= 2 * h;
    const double down = f(x);
    EXPECT_NEAR(ev.gradient[k], (up - down) / (2 * h), 1e-5) << k;
  }
  // Hessian row by differencing the analytic gradient.
  for (int k = 0; k < n; ++k) {
    if (!layout.active(k)) continue;
    std::vector<double> x = theta;
    const double h = 1e-5;
    x[k] += h;
    const auto gu = EvaluateReference(design, x, false).gradient;
    x[k] -= 2 * h;
    const auto gd = EvaluateReference(design, x, false).gradient;
    for (int l = 0; l < n; ++l) {
      EXPECT_NEAR(ev.hessian[static_cast<size_t>(k) * n + l],
                  (gu[l] - gd[l]) / (2 * h), 1e-4);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllVariants, KernelVariantTest,
    ::testing::Values(
        VariantConfig{TryModel::kOppositionDependent, HomeModel::kSingleKappa},
        VariantConfig{TryModel::kOppositionIndependent,
                      HomeModel::kSingleKappa},
        VariantConfig{TryModel::kOffensiveDefensive, HomeModel::kSingleKappa},
        VariantConfig{TryModel::kOppositionDependent, HomeModel::kTeamSpecific},
        VariantConfig{TryModel::kOffensiveDefensive, HomeModel::kNone}),
    [](const auto& info) { return testing::VariantName(info.param); });

TEST(KernelTest, BitIdenticalAcrossThreadCounts) {
  const Parameters truth = ReferenceTruth(12);
  const OutcomeCounts counts = SampleRoundRobin(truth, 2, 23, 7);
  const ParamLayout layout(12, {});
  const Design design = BuildDesign(layout, counts);
  const auto theta = Perturbed(layout, 3);
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  const Evaluation one = EvaluateParallel(design, theta, true);
  for (int threads : {2, 3, 8}) {
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    const Evaluation many = EvaluateParallel(design, theta, true);
    EXPECT_EQ(many.log_likelihood, one.log_likelihood);
    EXPECT_EQ(many.gradient, one.gradient);
    EXPECT_EQ(many.hessian, one.hessian);
  }
#ifdef _OPENMP
  omp_set_num_threads(saved);
#endif
}

TEST(KernelTest, EmptyBlocksAreSkipped) {
  Design d(2);
  const std::vector<double> zero = {0, 0};
  const std::vector<LinearForm> forms = {{{0, 1.0}}, {{1, 1.0}}};
  d.AddBlock(zero, forms);
  EXPECT_TRUE(d.blocks().empty());
  const Evaluation ev =
      EvaluateParallel(d, std::vector<double>{0.3, 0.1}, true);
  EXPECT_EQ(ev.log_likelihood, 0);
}

TEST(KernelTest, BinaryBlockClosedForm) {
  Design d(2);
  const std::vector<double> counts = {3, 1};
  const std::vector<LinearForm> forms = {{{0, 1.0}}, {{1, 1.0}}};
  d.AddBlock(counts, forms);
  const std::vector<double> theta = {std::log(2.0), 0.0};
  const Evaluation ev = EvaluateParallel(d, theta, true);
  EXPECT_NEAR(ev.log_likelihood, 3 * std::log(2.0 / 3) + std::log(1.0 / 3),
              1e-14);
  // Gradient: observed minus expected, 3 - 4*(2/3).
  EXPECT_NEAR(ev.gradient[0], 3 - 8.0 / 3, 1e-14);
  EXPECT_NEAR(ev.hessian[0], -4 * (2.0 / 3) * (1.0 / 3), 1e-14);
  EXPECT_NEAR(ev.hessian[1], 4 * (2.0 / 3) * (1.0 / 3), 1e-14);
}

TEST(KernelTest, RejectsBadBlocks) {
  Design d(1);
  const std::vector<double> counts = {1, -1};
  const std::vector<LinearForm> forms = {{{0, 1.0}}, {}};
  EXPECT_THROW(d.AddBlock(counts, forms), Error);
  const std::vector<LinearForm> oob = {{{3, 1.0}}, {}};
  EXPECT_THROW(d.AddBlock(std::vector<double>{1, 1}, oob), Error);
}

}  // namespace
}  // namespace rugbyrank
