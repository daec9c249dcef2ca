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

#include <algorithm>
#include <cmath>
#include <limits>

namespace rugbyrank {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckPositive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) {
    throw Error(std::string(what) + " must be positive and finite");
  }
}

void AddTerm(LinearForm& form, int param, double coeff) {
  if (coeff == 0) return;
  for (auto& [p, c] : form) {
    if (p == param) {
      c += coeff;
      return;
    }
  }
  form.emplace_back(param, coeff);
}

void AddScaled(LinearForm& form, const LinearForm& side, double scale) {
  for (const auto& [p, c] : side) AddTerm(form, p, scale * c);
}

// Drops terms that cancelled to zero and orders by parameter index.
void Canonicalize(LinearForm& form) {
  std::erase_if(form, [](const auto& t) { return t.second == 0; });
  std::sort(form.begin(), form.end());
}

template <size_t N>
std::array<double, N> Normalize(const std::array<double, N>& log_w) {
  const double lse = LogSumExp(log_w);
  std::array<double, N> p;
  for (size_t k = 0; k < N; ++k) p[k] = std::exp(log_w[k] - lse);
  return p;
}

template <size_t N>
std::array<double, N> ExpChecked(const std::array<double, N>& log_w) {
  std::array<double, N> w;
  for (size_t k = 0; k < N; ++k) {
    w[k] = std::exp(log_w[k]);
    if (!std::isfinite(w[k])) {
      throw Error(
          "outcome weight overflowed; evaluate probabilities in the log domain "
          "with Distribution()");
    }
  }
  return w;
}

// Default-variant log-weights from level-form strengths.
std::array<double, kNumResultOutcomes> ResultLogWeights(double pi_i,
                                                        double pi_j,
                                                        const Parameters& p,
                                                        bool at_home) {
  CheckPositive(pi_i, "strength");
  CheckPositive(pi_j, "strength");
  const double a = std::log(pi_i);
  const double b = std::log(pi_j);
  const double e = at_home ? std::log(p.kappa) : 0.0;
  const double bn = std::log(p.rho_n);
  return {4 * a + 4 * e, 4 * a + b + bn + 3 * e,
          2 * a + 2 * b + std::log(p.rho_d), a + 4 * b + bn - 3 * e,
          4 * b - 4 * e};
}

std::array<double, kNumTryOutcomes> TryLogWeights(double pi_i, double pi_j,
                                                  const Parameters& p,
                                                  bool at_home) {
  CheckPositive(pi_i, "strength");
  CheckPositive(pi_j, "strength");
  const double a = std::log(pi_i);
  const double b = std::log(pi_j);
  const double e = at_home ? std::log(p.kappa) : 0.0;
  switch (p.variant.try_model) {
    case TryModel::kOppositionDependent:
      return {a + b + std::log(p.tau_b), a + e, b - e, std::log(p.tau_z)};
    case TryModel::kOppositionIndependent: {
      const double g = std::log(p.extra.tau);
      return {a + b + 2 * g, a + g + e, b + g - e, 0.0};
    }
    case TryModel::kOffensiveDefensive:
      break;
  }
  throw Error(
      "offensive-defensive try weights need team deltas; use "
      "Distribution()");
}

}  // namespace

std::string_view TryModelName(TryModel t) {
  switch (t) {
    case TryModel::kOppositionDependent:
      return "opposition-dependent";
    case TryModel::kOppositionIndependent:
      return "opposition-independent";
    case TryModel::kOffensiveDefensive:
      return "offensive-defensive";
  }
  return "?";
}

std::string_view HomeModelName(HomeModel h) {
  switch (h) {
    case HomeModel::kSingleKappa:
      return "single-kappa";
    case HomeModel::kTeamSpecific:
      return "team-specific";
    case HomeModel::kNone:
      return "none";
  }
  return "?";
}

TryModel ParseTryModel(std::string_view name) {
  for (TryModel t :
       {TryModel::kOppositionDependent, TryModel::kOppositionIndependent,
        TryModel::kOffensiveDefensive}) {
    if (TryModelName(t) == name) return t;
  }
  throw Error("unknown try model '" + std::string(name) + "'");
}

HomeModel ParseHomeModel(std::string_view name) {
  for (HomeModel h :
       {HomeModel::kSingleKappa, HomeModel::kTeamSpecific, HomeModel::kNone}) {
    if (HomeModelName(h) == name) return h;
  }
  throw Error("unknown home model '" + std::string(name) + "'");
}

Parameters Parameters::Unit(int num_teams, VariantConfig variant) {
  Parameters p;
  p.variant = variant;
  p.strengths.assign(num_teams, 1.0);
  if (variant.try_model == TryModel::kOffensiveDefensive) {
    p.extra.delta.assign(num_teams, 1.0);
  }
  if (variant.home_model == HomeModel::kTeamSpecific) {
    p.extra.home_strengths.assign(num_teams, 1.0);
    p.extra.away_strengths.assign(num_teams, 1.0);
  }
  return p;
}

void Parameters::Validate() const {
  const size_t m = strengths.size();
  for (double s : strengths) CheckPositive(s, "strength");
  CheckPositive(rho_n, "rho_n");
  CheckPositive(rho_d, "rho_d");
  switch (variant.try_model) {
    case TryModel::kOppositionDependent:
      CheckPositive(tau_b, "tau_b");
      CheckPositive(tau_z, "tau_z");
      break;
    case TryModel::kOppositionIndependent:
      CheckPositive(extra.tau, "tau");
      break;
    case TryModel::kOffensiveDefensive:
      if (extra.delta.size() != m)
        throw Error("delta needs one value per team");
      for (double d : extra.delta) CheckPositive(d, "delta");
      break;
  }
  switch (variant.home_model) {
    case HomeModel::kSingleKappa:
      CheckPositive(kappa, "kappa");
      break;
    case HomeModel::kTeamSpecific:
      if (extra.home_strengths.size() != m ||
          extra.away_strengths.size() != m) {
        throw Error("home and away strengths need one value per team");
      }
      for (double s : extra.home_strengths) CheckPositive(s, "home strength");
      for (double s : extra.away_strengths) CheckPositive(s, "away strength");
      break;
    case HomeModel::kNone:
      break;
  }
}

ParamLayout::ParamLayout(int num_teams, VariantConfig variant)
    : num_teams_(num_teams), variant_(variant), active_(size(), false) {
  for (int i = 0; i < num_teams; ++i) {
    active_[strength(i)] = true;
    if (variant.home_model == HomeModel::kTeamSpecific) {
      active_[away_strength(i)] = true;
    }
    if (variant.try_model == TryModel::kOffensiveDefensive) {
      active_[delta(i)] = true;
    }
  }
  active_[structural(kRhoN)] = true;
  active_[structural(kRhoD)] = true;
  if (variant.try_model == TryModel::kOppositionDependent) {
    active_[structural(kTauB)] = true;
    active_[structural(kTauZ)] = true;
  }
  if (variant.try_model == TryModel::kOppositionIndependent) {
    active_[structural(kTau)] = true;
  }
  if (variant.home_model == HomeModel::kSingleKappa) {
    active_[structural(kKappa)] = true;
  }
}

bool ParamLayout::is_strength(int index) const {
  if (index < num_teams_) return true;
  return variant_.home_model == HomeModel::kTeamSpecific &&
         index < 2 * num_teams_;
}

std::string ParamLayout::Label(int index, const TeamIndex* teams) const {
  auto team = [&](int i) {
    return teams != nullptr && i < teams->size() ? teams->Name(i)
                                                 : std::to_string(i);
  };
  if (index < num_teams_) {
    return (variant_.home_model == HomeModel::kTeamSpecific ? "home_strength:"
                                                            : "strength:") +
           team(index);
  }
  if (index < 2 * num_teams_)
    return "away_strength:" + team(index - num_teams_);
  if (index < 3 * num_teams_) return "delta:" + team(index - 2 * num_teams_);
  static constexpr const char* kNames[] = {"rho_n", "rho_d", "tau_b",
                                           "tau_z", "tau",   "kappa"};
  return kNames[index - 3 * num_teams_];
}

std::vector<double> ParamLayout::ToLog(const Parameters& p) const {
  if (p.num_teams() != num_teams_ || p.variant != variant_) {
    throw Error("parameters do not match the layout");
  }
  p.Validate();
  std::vector<double> theta(size(), 0.0);
  const bool team_specific = variant_.home_model == HomeModel::kTeamSpecific;
  for (int i = 0; i < num_teams_; ++i) {
    theta[strength(i)] =
        std::log(team_specific ? p.extra.home_strengths[i] : p.strengths[i]);
    if (team_specific) {
      theta[away_strength(i)] = std::log(p.extra.away_strengths[i]);
    }
    if (variant_.try_model == TryModel::kOffensiveDefensive) {
      theta[delta(i)] = std::log(p.extra.delta[i]);
    }
  }
  auto set = [&](Structural s, double v) {
    if (active(structural(s))) theta[structural(s)] = std::log(v);
  };
  set(kRhoN, p.rho_n);
  set(kRhoD, p.rho_d);
  set(kTauB, p.tau_b);
  set(kTauZ, p.tau_z);
  set(kTau, p.extra.tau);
  set(kKappa, p.kappa);
  return theta;
}

Parameters ParamLayout::FromLog(std::span<const double> theta) const {
  Parameters p = Parameters::Unit(num_teams_, variant_);
  const bool team_specific = variant_.home_model == HomeModel::kTeamSpecific;
  for (int i = 0; i < num_teams_; ++i) {
    if (team_specific) {
      p.extra.home_strengths[i] = std::exp(theta[strength(i)]);
      p.extra.away_strengths[i] = std::exp(theta[away_strength(i)]);
      p.strengths[i] =
          std::exp(0.5 * (theta[strength(i)] + theta[away_strength(i)]));
    } else {
      p.strengths[i] = std::exp(theta[strength(i)]);
    }
    if (variant_.try_model == TryModel::kOffensiveDefensive) {
      p.extra.delta[i] = std::exp(theta[delta(i)]);
    }
  }
  p.rho_n = std::exp(theta[structural(kRhoN)]);
  p.rho_d = std::exp(theta[structural(kRhoD)]);
  p.tau_b = std::exp(theta[structural(kTauB)]);
  p.tau_z = std::exp(theta[structural(kTauZ)]);
  p.extra.tau = std::exp(theta[structural(kTau)]);
  p.kappa = std::exp(theta[structural(kKappa)]);
  return p;
}

std::vector<double> ParamLayout::GaugeDirection() const {
  std::vector<double> dir(size(), 0.0);
  for (int i = 0; i < size(); ++i) {
    if (active(i) && is_strength(i)) dir[i] = 1.0;
  }
  if (variant_.try_model == TryModel::kOffensiveDefensive) {
    for (int i = 0; i < num_teams_; ++i) dir[delta(i)] = 0.5;
  }
  dir[structural(kRhoN)] = -1.0;
  if (active(structural(kTauB))) dir[structural(kTauB)] = -1.0;
  if (active(structural(kTauZ))) dir[structural(kTauZ)] = 1.0;
  if (active(structural(kTau))) dir[structural(kTau)] = -1.0;
  return dir;
}

PairForms DescribePair(const ParamLayout& layout, TeamId home, TeamId away,
                       Venue venue) {
  const int m = layout.num_teams();
  if (home < 0 || home >= m || away < 0 || away >= m || home == away) {
    throw Error("invalid pairing");
  }
  const VariantConfig& v = layout.variant();
  const bool team_specific = v.home_model == HomeModel::kTeamSpecific;
  const bool neutral = venue == Venue::kNeutral;

  LinearForm s_home;
  LinearForm s_away;
  if (!team_specific) {
    s_home = {{layout.strength(home), 1.0}};
    s_away = {{layout.strength(away), 1.0}};
  } else if (neutral) {
    s_home = {{layout.strength(home), 0.5}, {layout.away_strength(home), 0.5}};
    s_away = {{layout.strength(away), 0.5}, {layout.away_strength(away), 0.5}};
  } else {
    s_home = {{layout.strength(home), 1.0}};
    s_away = {{layout.away_strength(away), 1.0}};
  }
  const bool kappa = v.home_model == HomeModel::kSingleKappa && !neutral;
  const int eta = layout.structural(ParamLayout::kKappa);
  const int bn = layout.structural(ParamLayout::kRhoN);
  const int bd = layout.structural(ParamLayout::kRhoD);

  PairForms f;
  // Result block: exponents are the league points of each side; kappa carries
  // the home-minus-away difference.
  for (int r = 0; r < kNumResultOutcomes; ++r) {
    AddScaled(f.result[r], s_home, kResultPoints[r].home);
    AddScaled(f.result[r], s_away, kResultPoints[r].away);
    if (kappa) {
      AddTerm(f.result[r], eta, kResultPoints[r].home - kResultPoints[r].away);
    }
  }
  AddTerm(f.result[1], bn, 1.0);
  AddTerm(f.result[2], bd, 1.0);
  AddTerm(f.result[3], bn, 1.0);

  for (int t = 0; t < kNumTryOutcomes; ++t) {
    AddScaled(f.tries[t], s_home, kTryPoints[t].home);
    AddScaled(f.tries[t], s_away, kTryPoints[t].away);
    if (kappa) {
      AddTerm(f.tries[t], eta, kTryPoints[t].home - kTryPoints[t].away);
    }
  }
  switch (v.try_model) {
    case TryModel::kOppositionDependent:
      AddTerm(f.tries[0], layout.structural(ParamLayout::kTauB), 1.0);
      AddTerm(f.tries[3], layout.structural(ParamLayout::kTauZ), 1.0);
      break;
    case TryModel::kOppositionIndependent: {
      const int g = layout.structural(ParamLayout::kTau);
      AddTerm(f.tries[0], g, 2.0);
      AddTerm(f.tries[1], g, 1.0);
      AddTerm(f.tries[2], g, 1.0);
      break;
    }
    case TryModel::kOffensiveDefensive:
      // omega_i^a omega_j^b delta_i^(1-b) delta_j^(1-a) with log omega =
      // log pi - log delta: each delta has exponent 1 - a - b.
      AddTerm(f.tries[0], layout.delta(home), -1.0);
      AddTerm(f.tries[0], layout.delta(away), -1.0);
      AddTerm(f.tries[3], layout.delta(home), 1.0);
      AddTerm(f.tries[3], layout.delta(away), 1.0);
      break;
  }
  for (auto& form : f.result) Canonicalize(form);
  for (auto& form : f.tries) Canonicalize(form);
  return f;
}

double EvaluateForm(const LinearForm& form, std::span<const double> theta) {
  double s = 0;
  for (const auto& [p, c] : form) s += c * theta[p];
  return s;
}

double LogSumExp(std::span<const double> x) {
  double mx = -kInf;
  for (double v : x) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double s = 0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

std::array<double, kNumResultOutcomes> ResultWeights(double pi_i, double pi_j,
                                                     const Parameters& params,
                                                     bool at_home) {
  return ExpChecked(ResultLogWeights(pi_i, pi_j, params, at_home));
}

std::array<double, kNumTryOutcomes> TryWeights(double pi_i, double pi_j,
                                               const Parameters& params,
                                               bool at_home) {
  return ExpChecked(TryLogWeights(pi_i, pi_j, params, at_home));
}

std::array<double, kNumResultOutcomes> ResultProbs(double pi_i, double pi_j,
                                                   const Parameters& params,
                                                   bool at_home) {
  return Normalize(ResultLogWeights(pi_i, pi_j, params, at_home));
}

std::array<double, kNumTryOutcomes> TryProbs(double pi_i, double pi_j,
                                             const Parameters& params,
                                             bool at_home) {
  return Normalize(TryLogWeights(pi_i, pi_j, params, at_home));
}

OutcomeDistribution Distribution(const ParamLayout& layout,
                                 std::span<const double> theta, TeamId home,
                                 TeamId away, Venue venue) {
  const PairForms forms = DescribePair(layout, home, away, venue);
  std::array<double, kNumResultOutcomes> lr;
  std::array<double, kNumTryOutcomes> lt;
  for (int r = 0; r < kNumResultOutcomes; ++r) {
    lr[r] = EvaluateForm(forms.result[r], theta);
  }
  for (int t = 0; t < kNumTryOutcomes; ++t) {
    lt[t] = EvaluateForm(forms.tries[t], theta);
  }
  return {Normalize(lr), Normalize(lt)};
}

OutcomeDistribution Distribution(const Parameters& params, TeamId home,
                                 TeamId away, Venue venue) {
  const ParamLayout layout(params.num_teams(), params.variant);
  const std::vector<double> theta = layout.ToLog(params);
  return Distribution(layout, theta, home, away, venue);
}

std::pair<double, double> ExpectedPoints(const OutcomeDistribution& d) {
  double home = 0;
  double away = 0;
  for (int r = 0; r < kNumResultOutcomes; ++r) {
    home += d.result[r] * kResultPoints[r].home;
    away += d.result[r] * kResultPoints[r].away;
  }
  for (int t = 0; t < kNumTryOutcomes; ++t) {
    home += d.tries[t] * kTryPoints[t].home;
    away += d.tries[t] * kTryPoints[t].away;
  }
  return {home, away};
}

std::pair<double, double> ExpectedPoints(const Parameters& params, TeamId home,
                                         TeamId away, Venue venue) {
  return ExpectedPoints(Distribution(params, home, away, venue));
}

namespace {

OutcomeSummary Summarize(const OutcomeDistribution& d) {
  OutcomeSummary s;
  s.wide = d.result[0] + d.result[4];
  s.narrow = d.result[1] + d.result[3];
  s.draw = d.result[2];
  s.home_win = d.result[0] + d.result[1];
  s.away_win = d.result[3] + d.result[4];
  s.home_away_win_ratio = s.home_win / s.away_win;
  s.both_bonus = d.tries[0];
  s.home_bonus_only = d.tries[1];
  s.away_bonus_only = d.tries[2];
  s.zero_bonus = d.tries[3];
  return s;
}

}  // namespace

StructuralInterpretation InterpretStructural(const Parameters& params) {
  // Two hypothetical unit-strength teams; per-team variant parameters (delta,
  // home/away strengths) are set to their unit values.
  VariantConfig v = params.variant;
  if (v.home_model == HomeModel::kTeamSpecific) v.home_model = HomeModel::kNone;
  Parameters unit = Parameters::Unit(2, v);
  unit.rho_n = params.rho_n;
  unit.rho_d = params.rho_d;
  unit.tau_b = params.tau_b;
  unit.tau_z = params.tau_z;
  unit.kappa = params.kappa;
  unit.extra.tau = params.extra.tau;

  StructuralInterpretation out;
  out.with_home_advantage =
      Summarize(Distribution(unit, 0, 1, Venue::kHomeGround));
  out.neutral = Summarize(Distribution(unit, 0, 1, Venue::kNeutral));
  return out;
}

Parameters GaugeTransform(const Parameters& params, double c) {
  CheckPositive(c, "gauge scale");
  Parameters p = params;
  for (double& s : p.strengths) s *= c;
  p.rho_n /= c;
  p.tau_b /= c;
  p.tau_z *= c;
  p.extra.tau /= c;
  const double root_c = std::sqrt(c);
  for (double& d : p.extra.delta) d *= root_c;
  for (double& s : p.extra.home_strengths) s *= c;
  for (double& s : p.extra.away_strengths) s *= c;
  return p;
}

double GeneralizedMean(std::span<const double> strengths) {
  if (strengths.empty()) throw Error("generalized mean of no strengths");
  double s = 0;
  for (double x : strengths) {
    if (std::isnan(x) || x < 0) throw Error("strengths must be non-negative");
    s += std::isinf(x) ? 2.0 : 2.0 * x / (1.0 + x);
  }
  return s / static_cast<double>(strengths.size());
}

double SolveScale(std::span<const double> strengths) {
  if (strengths.empty()) throw Error("cannot normalize an empty field");
  size_t infinite = 0;
  size_t positive = 0;
  for (double x : strengths) {
    if (std::isnan(x) || x < 0) throw Error("strengths must be non-negative");
    if (x > 0) ++positive;
    if (std::isinf(x)) ++infinite;
  }
  // g(c) rises from 2*infinite/m to 2*positive/m.
  const size_t m = strengths.size();
  if (2 * positive <= m || 2 * infinite >= m) {
    throw Error(
        "no scale gives a generalized mean of 1 (too many zero or infinite "
        "strengths)");
  }
  auto g = [&](double log_c) {
    const double c = std::exp(log_c);
    double s = 0;
    for (double x : strengths) {
      if (std::isinf(x)) {
        s += 2.0;
      } else if (x > 0) {
        s += 2.0 * c * x / (1.0 + c * x);
      }
    }
    return s / static_cast<double>(m) - 1.0;
  };
  double lo = -1.0;
  double hi = 1.0;
  while (g(lo) > 0) lo *= 2;
  while (g(hi) < 0) hi *= 2;
  // Relative tolerance 1e-12 on c is an absolute tolerance on log c.
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double v = g(mid);
    if (v == 0) return std::exp(mid);
    (v < 0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

std::vector<double> ArithmeticNormalize(std::span<const double> strengths) {
  if (strengths.empty()) throw Error("cannot normalize an empty field");
  double sum = 0;
  for (double x : strengths) {
    if (!std::isfinite(x)) {
      throw Error(
          "arithmetic mean is undefined with an infinite strength; use the "
          "generalized mean");
    }
    sum += x;
  }
  const double mean = sum / static_cast<double>(strengths.size());
  if (!(mean > 0)) throw Error("arithmetic mean must be positive");
  std::vector<double> out(strengths.begin(), strengths.end());
  for (double& x : out) x /= mean;
  return out;
}

}  // namespace rugbyrank
