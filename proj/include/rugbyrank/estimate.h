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

#ifndef RUGBYRANK_ESTIMATE_H_
#define RUGBYRANK_ESTIMATE_H_

#include <optional>
#include <string>
#include <vector>

#include "rugbyrank/domain.h"
#include "rugbyrank/model.h"

namespace rugbyrank {

// Symmetric prior: every team plays two notional matches against a dummy team
// of strength `dummy_strength`, winning one and losing one, each weighted by
// `weight`.
struct PriorConfig {
  double weight = 0.0;
  double dummy_strength = 1.0;

  void Validate() const;
};

// Structural parameters held fixed during a fit. Unset values are estimated.
struct StructuralFreeze {
  std::optional<double> rho_n;
  std::optional<double> rho_d;
  std::optional<double> tau_b;
  std::optional<double> tau_z;
  std::optional<double> tau;
  std::optional<double> kappa;

  bool any() const { return rho_n || rho_d || tau_b || tau_z || tau || kappa; }
  // Freezes every structural parameter at the values in `p`.
  static StructuralFreeze All(const Parameters& p);
};

enum class Execution { kParallel, kReference };

struct FitConfig {
  VariantConfig variant;
  PriorConfig prior;
  // On the max-norm of the score over free log-parameters.
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
  StructuralFreeze freeze;
  Execution execution = Execution::kParallel;
};

struct StatResidual {
  std::string name;
  double observed = 0;
  double expected = 0;
  bool free = true;  // false when the matching parameter was frozen
};

struct ConvergenceReport {
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0;
  double log_likelihood = 0;
  // Log-likelihood after each accepted step, starting point first.
  std::vector<double> trace;
  // League points per team over real and prior matches.
  std::vector<double> observed_points;
  std::vector<double> expected_points;
  // n, d, b, z, h (and variant totals), observed vs expected.
  std::vector<StatResidual> totals;
  // Offensive-defensive only: per-team "result points plus matches without
  // conceding a try bonus", the stationarity condition for delta.
  std::vector<double> observed_defensive;
  std::vector<double> expected_defensive;
  // Team-specific home only: points at home and away (neutral split evenly).
  std::vector<double> observed_home_points;
  std::vector<double> expected_home_points;
  std::vector<double> observed_away_points;
  std::vector<double> expected_away_points;
};

struct FittedModel {
  VariantConfig variant;
  std::vector<std::string> team_names;
  // Gauge-normalized to a generalized mean of 1.
  Parameters parameters;
  // As converged.
  Parameters raw_parameters;
  PriorConfig prior;
  StructuralFreeze freeze;
  ConvergenceReport report;
};

// Non-convergence. Carries the last iterate and the parameters judged to be
// diverging.
class FitError : public Error {
 public:
  FitError(const std::string& what, FittedModel best,
           std::vector<std::string> diverging)
      : Error(what), best_(std::move(best)), diverging_(std::move(diverging)) {}

  const FittedModel& best_iterate() const { return best_; }
  const std::vector<std::string>& diverging() const { return diverging_; }

 private:
  FittedModel best_;
  std::vector<std::string> diverging_;
};

// Fully normalized data log-likelihood (per-pair normalizers subtracted) plus
// the prior term weight * sum_i [log pi_i + log pi_0 - 2 log(pi_i + pi_0)].
double LogLikelihood(const Parameters& params, const OutcomeCounts& counts,
                     const PriorConfig& prior);

// Gradient of LogLikelihood over the log-parameters, in ParamLayout order.
// Inactive entries are zero.
std::vector<double> Score(const Parameters& params, const OutcomeCounts& counts,
                          const PriorConfig& prior);

// Maximum-likelihood fit. Throws FitError when the iteration limit is reached
// or the data put some parameter on the boundary (e.g. an undefeated team
// with no prior).
FittedModel Fit(const OutcomeCounts& counts, const FitConfig& config,
                const TeamIndex* teams = nullptr);

// Fit with every structural parameter held at `fixed`; only per-team
// parameters are estimated.
FittedModel FreezeAndRefit(const OutcomeCounts& counts,
                           const StructuralFreeze& fixed, FitConfig config,
                           const TeamIndex* teams = nullptr);

// Residual report for arbitrary parameters (used by Fit).
ConvergenceReport Residuals(const Parameters& params,
                            const OutcomeCounts& counts,
                            const PriorConfig& prior);

}  // namespace rugbyrank

#endif  // RUGBYRANK_ESTIMATE_H_
