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

#ifndef RUGBYRANK_MODEL_H_
#define RUGBYRANK_MODEL_H_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rugbyrank/domain.h"

namespace rugbyrank {

// How the four try-bonus outcomes depend on the teams.
enum class TryModel {
  // Both/home/away/zero weights tau_b*pi_i*pi_j, kappa*pi_i, pi_j/kappa, tau_z.
  kOppositionDependent,
  // Each side independently gains a bonus with weight tau*pi (times kappa^+-1).
  kOppositionIndependent,
  // pi = omega * delta; bonus gained scales with omega, not conceding with
  // delta.
  kOffensiveDefensive,
};

enum class HomeModel {
  kSingleKappa,
  // Separate home and away strengths per team, no kappa.
  kTeamSpecific,
  kNone,
};

struct VariantConfig {
  TryModel try_model = TryModel::kOppositionDependent;
  HomeModel home_model = HomeModel::kSingleKappa;
  friend bool operator==(const VariantConfig&, const VariantConfig&) = default;
};

std::string_view TryModelName(TryModel t);
std::string_view HomeModelName(HomeModel h);
TryModel ParseTryModel(std::string_view name);
HomeModel ParseHomeModel(std::string_view name);

// Per-team parameters used only by some variants.
struct VariantParameters {
  double tau = 1.0;           // kOppositionIndependent
  std::vector<double> delta;  // kOffensiveDefensive; omega = pi / delta
  std::vector<double> home_strengths;  // kTeamSpecific
  std::vector<double> away_strengths;  // kTeamSpecific
};

// Model parameters in level form. Under kTeamSpecific, `strengths` holds the
// geometric mean of home and away strength and is not used for probabilities.
struct Parameters {
  VariantConfig variant;
  std::vector<double> strengths;
  double rho_n = 1.0;
  double rho_d = 1.0;
  double tau_b = 1.0;
  double tau_z = 1.0;
  double kappa = 1.0;
  VariantParameters extra;

  int num_teams() const { return static_cast<int>(strengths.size()); }

  // Unit parameters for `num_teams` teams.
  static Parameters Unit(int num_teams, VariantConfig variant = {});

  // Throws Error unless every used parameter is positive and finite and the
  // per-team vectors have the right length.
  void Validate() const;
};

// Index map from a Parameters record to one flat vector of log-parameters.
//
// [0, m)        log strength (home strength under kTeamSpecific)
// [m, 2m)       log away strength (kTeamSpecific only)
// [2m, 3m)      log delta (kOffensiveDefensive only)
// 3m + 0..5     log rho_n, log rho_d, log tau_b, log tau_z, log tau, log kappa
//
// Entries the variant does not use stay at 0 and are inactive.
class ParamLayout {
 public:
  enum Structural { kRhoN = 0, kRhoD, kTauB, kTauZ, kTau, kKappa };
  static constexpr int kNumStructural = 6;

  ParamLayout(int num_teams, VariantConfig variant);

  int num_teams() const { return num_teams_; }
  int size() const { return 3 * num_teams_ + kNumStructural; }
  const VariantConfig& variant() const { return variant_; }

  int strength(TeamId i) const { return i; }
  int away_strength(TeamId i) const { return num_teams_ + i; }
  int delta(TeamId i) const { return 2 * num_teams_ + i; }
  int structural(Structural s) const { return 3 * num_teams_ + s; }

  bool active(int index) const { return active_[index]; }
  // True for log-strength entries that carry the dummy-team prior.
  bool is_strength(int index) const;
  std::string Label(int index, const TeamIndex* teams = nullptr) const;

  std::vector<double> ToLog(const Parameters& p) const;
  Parameters FromLog(std::span<const double> theta) const;

  // Direction in log space along which the data likelihood is flat.
  std::vector<double> GaugeDirection() const;

 private:
  int num_teams_;
  VariantConfig variant_;
  std::vector<bool> active_;
};

// Sparse linear form: log-weight = sum of coeff * theta[param].
using LinearForm = std::vector<std::pair<int, double>>;

struct PairForms {
  std::array<LinearForm, kNumResultOutcomes> result;
  std::array<LinearForm, kNumTryOutcomes> tries;
};

// Log-linear description of one (home, away, venue) match: the result and try
// blocks are normalized separately. Neutral venues drop home advantage and,
// under kTeamSpecific, use the mean of a team's home and away log strength.
PairForms DescribePair(const ParamLayout& layout, TeamId home, TeamId away,
                       Venue venue);

double EvaluateForm(const LinearForm& form, std::span<const double> theta);

// Natural log of sum(exp(x)), shifted by the maximum.
double LogSumExp(std::span<const double> x);

struct OutcomeDistribution {
  std::array<double, kNumResultOutcomes> result{};
  std::array<double, kNumTryOutcomes> tries{};

  double Joint(ResultOutcome r, TryOutcome t) const {
    return result[static_cast<int>(r)] * tries[static_cast<int>(t)];
  }
};

// Unnormalized weights for a match between strengths pi_i (home) and pi_j
// under the default variant. at_home = false drops kappa. Throws Error if a
// weight overflows; use Distribution() for log-domain evaluation.
std::array<double, kNumResultOutcomes> ResultWeights(double pi_i, double pi_j,
                                                     const Parameters& params,
                                                     bool at_home);
std::array<double, kNumTryOutcomes> TryWeights(double pi_i, double pi_j,
                                               const Parameters& params,
                                               bool at_home);
std::array<double, kNumResultOutcomes> ResultProbs(double pi_i, double pi_j,
                                                   const Parameters& params,
                                                   bool at_home);
std::array<double, kNumTryOutcomes> TryProbs(double pi_i, double pi_j,
                                             const Parameters& params,
                                             bool at_home);

// Probabilities for a scheduled match between two teams of `params`, for any
// variant.
OutcomeDistribution Distribution(const Parameters& params, TeamId home,
                                 TeamId away, Venue venue);
OutcomeDistribution Distribution(const ParamLayout& layout,
                                 std::span<const double> theta, TeamId home,
                                 TeamId away, Venue venue);

// Expected league points (home, away) for a match, default points system.
std::pair<double, double> ExpectedPoints(const OutcomeDistribution& d);
std::pair<double, double> ExpectedPoints(const Parameters& params, TeamId home,
                                         TeamId away, Venue venue);

struct OutcomeSummary {
  double wide = 0;
  double narrow = 0;
  double draw = 0;
  double home_win = 0;
  double away_win = 0;
  double home_away_win_ratio = 0;
  double both_bonus = 0;
  double zero_bonus = 0;
  double home_bonus_only = 0;
  double away_bonus_only = 0;
};

// Outcome propensities for a match between two teams of unit strength, with
// the fitted home advantage and with kappa forced to 1.
struct StructuralInterpretation {
  OutcomeSummary with_home_advantage;
  OutcomeSummary neutral;
};

StructuralInterpretation InterpretStructural(const Parameters& params);

// Rescales strengths by c > 0 and co-transforms the structural parameters so
// that every match distribution is unchanged.
Parameters GaugeTransform(const Parameters& params, double c);

// (1/m) sum 2 pi / (1 + pi). Infinite strengths contribute 2.
double GeneralizedMean(std::span<const double> strengths);

// Unique c > 0 with GeneralizedMean(c * strengths) == 1, by bisection in
// log c. Throws Error if no root exists (e.g. all strengths zero).
double SolveScale(std::span<const double> strengths);

// Divides by the arithmetic mean. Throws Error on infinite strengths.
std::vector<double> ArithmeticNormalize(std::span<const double> strengths);

}  // namespace rugbyrank

#endif  // RUGBYRANK_MODEL_H_
