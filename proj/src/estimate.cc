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

#include "rugbyrank/estimate.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rugbyrank/kernels.h"

namespace rugbyrank {
namespace {

// A free log-parameter past this magnitude is treated as diverging; iteration
// stops once one passes kStopBound.
constexpr double kDivergenceBound = 20.0;
constexpr double kStopBound = 30.0;
// Largest change to any log-parameter in one step.
constexpr double kMaxStep = 5.0;

double Sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                : std::exp(x) / (1.0 + std::exp(x));
}

// log(1 + e^x) without overflow.
double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void AddPrior(const ParamLayout& layout, const PriorConfig& prior,
              std::span<const double> theta, Evaluation& ev) {
  if (prior.weight == 0) return;
  const double w = prior.weight;
  const double lp0 = std::log(prior.dummy_strength);
  const int n = layout.size();
  for (int k = 0; k < n; ++k) {
    if (!layout.active(k) || !layout.is_strength(k)) continue;
    const double x = theta[k] - lp0;
    // log(pi/(pi+pi0)) + log(pi0/(pi+pi0)) = x - 2 log(1 + e^x).
    ev.log_likelihood += w * (x - 2.0 * Softplus(x));
    const double s = Sigmoid(x);
    ev.gradient[k] += w * (1.0 - 2.0 * s);
    if (!ev.hessian.empty()) {
      ev.hessian[static_cast<size_t>(k) * n + k] -= 2.0 * w * s * (1.0 - s);
    }
  }
}

class Objective {
 public:
  Objective(const ParamLayout& layout, const OutcomeCounts& counts,
            const PriorConfig& prior, Execution execution)
      : layout_(layout),
        design_(BuildDesign(layout, counts)),
        prior_(prior),
        execution_(execution) {}

  Evaluation operator()(std::span<const double> theta, bool hessian) const {
    Evaluation ev = execution_ == Execution::kParallel
                        ? EvaluateParallel(design_, theta, hessian)
                        : EvaluateReference(design_, theta, hessian);
    AddPrior(layout_, prior_, theta, ev);
    return ev;
  }

  const Design& design() const { return design_; }

 private:
  const ParamLayout& layout_;
  Design design_;
  PriorConfig prior_;
  Execution execution_;
};

std::string TeamName(const TeamIndex* teams, TeamId i) {
  if (teams != nullptr && i < teams->size()) return teams->Name(i);
  return "team " + std::to_string(i);
}

// Parameters whose sufficient statistic sits at the edge of its achievable
// range. Along that coordinate the likelihood is monotone, so no finite
// maximum exists.
std::vector<std::string> BoundaryDiagnosis(const ParamLayout& layout,
                                           const Design& design,
                                           const std::vector<bool>& free,
                                           const PriorConfig& prior,
                                           const TeamIndex* teams) {
  const int n = layout.size();
  std::vector<double> obs(n, 0.0), lo(n, 0.0), hi(n, 0.0);
  std::vector<bool> seen(n, false);
  const auto& counts = design.counts();
  const auto& params = design.local_params();
  const auto& f = design.features();
  for (const Design::Block& b : design.blocks()) {
    const int k = b.num_local;
    for (int l = 0; l < k; ++l) {
      const int p = params[b.local_offset + l];
      double mn = std::numeric_limits<double>::infinity();
      double mx = -mn;
      for (int c = 0; c < b.num_cells; ++c) {
        const double v = f[b.feature_offset + c * k + l];
        obs[p] += counts[b.cell_offset + c] * v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
      lo[p] += b.total * mn;
      hi[p] += b.total * mx;
      seen[p] = true;
    }
  }
  std::vector<std::string> out;
  for (int p = 0; p < n; ++p) {
    if (!free[p] || !seen[p]) continue;
    if (prior.weight > 0 && layout.is_strength(p)) continue;
    if (hi[p] - lo[p] < 1e-9) continue;
    const double tol = 1e-9 * (1.0 + std::abs(hi[p]) + std::abs(lo[p]));
    const bool at_max = std::abs(obs[p] - hi[p]) <= tol;
    const bool at_min = std::abs(obs[p] - lo[p]) <= tol;
    if (!at_max && !at_min) continue;
    std::ostringstream msg;
    if (layout.is_strength(p)) {
      const TeamId team = p % layout.num_teams();
      const std::string what =
          p < layout.num_teams() ? "strength" : "away strength";
      msg << TeamName(teams, team)
          << (at_max ? " took the maximum possible points in every match "
                       "(undefeated); "
                     : " took the minimum possible points in every match; ")
          << what << " diverging to " << (at_max ? "infinity" : "zero")
          << "; supply a prior weight";
    } else {
      msg << layout.Label(p, teams) << " statistic is at the "
          << (at_max ? "maximum" : "minimum")
          << " achievable value; parameter diverging; freeze it";
    }
    out.push_back(msg.str());
  }
  return out;
}

void ApplyFreeze(const ParamLayout& layout, const StructuralFreeze& freeze,
                 std::vector<double>& theta, std::vector<bool>& free) {
  auto apply = [&](ParamLayout::Structural s, const std::optional<double>& v,
                   const char* name) {
    if (!v) return;
    const int k = layout.structural(s);
    if (!layout.active(k)) return;
    if (!(*v > 0) || !std::isfinite(*v)) {
      throw Error(std::string("frozen ") + name + " must be positive");
    }
    theta[k] = std::log(*v);
    free[k] = false;
  };
  apply(ParamLayout::kRhoN, freeze.rho_n, "rho_n");
  apply(ParamLayout::kRhoD, freeze.rho_d, "rho_d");
  apply(ParamLayout::kTauB, freeze.tau_b, "tau_b");
  apply(ParamLayout::kTauZ, freeze.tau_z, "tau_z");
  apply(ParamLayout::kTau, freeze.tau, "tau");
  apply(ParamLayout::kKappa, freeze.kappa, "kappa");
}

}  // namespace

void PriorConfig::Validate() const {
  if (!(weight >= 0) || !std::isfinite(weight)) {
    throw Error("prior weight must be non-negative");
  }
  if (dummy_strength != 1.0) throw Error("dummy team strength is fixed at 1");
}

StructuralFreeze StructuralFreeze::All(const Parameters& p) {
  StructuralFreeze f;
  f.rho_n = p.rho_n;
  f.rho_d = p.rho_d;
  f.tau_b = p.tau_b;
  f.tau_z = p.tau_z;
  f.tau = p.extra.tau;
  f.kappa = p.kappa;
  return f;
}

double LogLikelihood(const Parameters& params, const OutcomeCounts& counts,
                     const PriorConfig& prior) {
  prior.Validate();
  const ParamLayout layout(params.num_teams(), params.variant);
  const std::vector<double> theta = layout.ToLog(params);
  const Objective objective(layout, counts, prior, Execution::kParallel);
  return objective(theta, false).log_likelihood;
}

std::vector<double> Score(const Parameters& params, const OutcomeCounts& counts,
                          const PriorConfig& prior) {
  prior.Validate();
  const ParamLayout layout(params.num_teams(), params.variant);
  const std::vector<double> theta = layout.ToLog(params);
  const Objective objective(layout, counts, prior, Execution::kParallel);
  return objective(theta, false).gradient;
}

ConvergenceReport Residuals(const Parameters& params,
                            const OutcomeCounts& counts,
                            const PriorConfig& prior) {
  const int m = params.num_teams();
  const ParamLayout layout(m, params.variant);
  const std::vector<double> theta = layout.ToLog(params);
  const VariantConfig& v = params.variant;
  const bool od = v.try_model == TryModel::kOffensiveDefensive;
  const bool ts = v.home_model == HomeModel::kTeamSpecific;

  ConvergenceReport rep;
  rep.observed_points.assign(m, 0.0);
  rep.expected_points.assign(m, 0.0);
  if (od) {
    rep.observed_defensive.assign(m, 0.0);
    rep.expected_defensive.assign(m, 0.0);
  }
  if (ts) {
    rep.observed_home_points.assign(m, 0.0);
    rep.expected_home_points.assign(m, 0.0);
    rep.observed_away_points.assign(m, 0.0);
    rep.expected_away_points.assign(m, 0.0);
  }
  double n_obs = 0, n_exp = 0, d_obs = 0, d_exp = 0, b_obs = 0, b_exp = 0;
  double z_obs = 0, z_exp = 0, h_obs = 0, h_exp = 0, t_obs = 0, t_exp = 0;

  for (const PairCounts& pc : counts.pairs) {
    const OutcomeDistribution dist =
        Distribution(layout, theta, pc.home, pc.away, pc.venue);
    const double mr = pc.result_total();
    const double mt = pc.try_total();
    const bool home_ground = pc.venue == Venue::kHomeGround;
    double ph_obs = 0, ph_exp = 0, pa_obs = 0, pa_exp = 0;
    double rh_obs = 0, rh_exp = 0, ra_obs = 0, ra_exp = 0;
    for (int r = 0; r < kNumResultOutcomes; ++r) {
      rh_obs += pc.results[r] * kResultPoints[r].home;
      ra_obs += pc.results[r] * kResultPoints[r].away;
      rh_exp += mr * dist.result[r] * kResultPoints[r].home;
      ra_exp += mr * dist.result[r] * kResultPoints[r].away;
    }
    ph_obs = rh_obs;
    ph_exp = rh_exp;
    pa_obs = ra_obs;
    pa_exp = ra_exp;
    for (int t = 0; t < kNumTryOutcomes; ++t) {
      ph_obs += pc.tries[t] * kTryPoints[t].home;
      pa_obs += pc.tries[t] * kTryPoints[t].away;
      ph_exp += mt * dist.tries[t] * kTryPoints[t].home;
      pa_exp += mt * dist.tries[t] * kTryPoints[t].away;
    }
    rep.observed_points[pc.home] += ph_obs;
    rep.expected_points[pc.home] += ph_exp;
    rep.observed_points[pc.away] += pa_obs;
    rep.expected_points[pc.away] += pa_exp;

    n_obs += pc.results[1] + pc.results[3];
    n_exp += mr * (dist.result[1] + dist.result[3]);
    d_obs += pc.results[2];
    d_exp += mr * dist.result[2];
    b_obs += pc.tries[0];
    b_exp += mt * dist.tries[0];
    z_obs += pc.tries[3];
    z_exp += mt * dist.tries[3];
    t_obs += 2 * pc.tries[0] + pc.tries[1] + pc.tries[2];
    t_exp += mt * (2 * dist.tries[0] + dist.tries[1] + dist.tries[2]);
    if (home_ground) {
      h_obs += ph_obs - pa_obs;
      h_exp += ph_exp - pa_exp;
    }
    if (od) {
      // Home concedes nothing in cells HB, ZB; away in AB, ZB.
      rep.observed_defensive[pc.home] += rh_obs + pc.tries[1] + pc.tries[3];
      rep.expected_defensive[pc.home] +=
          rh_exp + mt * (dist.tries[1] + dist.tries[3]);
      rep.observed_defensive[pc.away] += ra_obs + pc.tries[2] + pc.tries[3];
      rep.expected_defensive[pc.away] +=
          ra_exp + mt * (dist.tries[2] + dist.tries[3]);
    }
    if (ts) {
      const double share = home_ground ? 1.0 : 0.5;
      rep.observed_home_points[pc.home] += share * ph_obs;
      rep.expected_home_points[pc.home] += share * ph_exp;
      rep.observed_away_points[pc.away] += share * pa_obs;
      rep.expected_away_points[pc.away] += share * pa_exp;
      if (!home_ground) {
        rep.observed_away_points[pc.home] += share * ph_obs;
        rep.expected_away_points[pc.home] += share * ph_exp;
        rep.observed_home_points[pc.away] += share * pa_obs;
        rep.expected_home_points[pc.away] += share * pa_exp;
      }
    }
  }

  if (prior.weight > 0) {
    const double w = prior.weight;
    const double lp0 = std::log(prior.dummy_strength);
    for (int k = 0; k < layout.size(); ++k) {
      if (!layout.active(k) || !layout.is_strength(k)) continue;
      const TeamId team = k % m;
      const double e = 2.0 * w * Sigmoid(theta[k] - lp0);
      rep.observed_points[team] += w;
      rep.expected_points[team] += e;
      if (od) {
        rep.observed_defensive[team] += w;
        rep.expected_defensive[team] += e;
      }
      if (ts) {
        auto& o = k < m ? rep.observed_home_points : rep.observed_away_points;
        auto& x = k < m ? rep.expected_home_points : rep.expected_away_points;
        o[team] += w;
        x[team] += e;
      }
    }
  }

  auto is_active = [&](ParamLayout::Structural s) {
    return layout.active(layout.structural(s));
  };
  rep.totals.push_back({"narrow", n_obs, n_exp, is_active(ParamLayout::kRhoN)});
  rep.totals.push_back({"draws", d_obs, d_exp, is_active(ParamLayout::kRhoD)});
  rep.totals.push_back(
      {"both_bonus", b_obs, b_exp, is_active(ParamLayout::kTauB)});
  rep.totals.push_back(
      {"zero_bonus", z_obs, z_exp, is_active(ParamLayout::kTauZ)});
  rep.totals.push_back(
      {"home_minus_away", h_obs, h_exp, is_active(ParamLayout::kKappa)});
  if (v.try_model == TryModel::kOppositionIndependent) {
    rep.totals.push_back(
        {"try_bonuses", t_obs, t_exp, is_active(ParamLayout::kTau)});
  }
  return rep;
}

FittedModel Fit(const OutcomeCounts& counts, const FitConfig& config,
                const TeamIndex* teams) {
  config.prior.Validate();
  if (!(config.gradient_tolerance > 0)) {
    throw Error("gradient tolerance must be positive");
  }
  const int m = counts.num_teams;
  if (m < 1) throw Error("no teams to fit");
  if (counts.empty() && config.prior.weight == 0) {
    throw Error("no matches and no prior: nothing to fit");
  }
  if (config.prior.weight == 0) {
    std::vector<bool> plays(m, false);
    for (const PairCounts& pc : counts.pairs) {
      plays[pc.home] = plays[pc.away] = true;
    }
    for (TeamId i = 0; i < m; ++i) {
      if (!plays[i]) {
        throw Error(TeamName(teams, i) +
                    " has no matches; supply a prior weight or drop the team");
      }
    }
  }

  const ParamLayout layout(m, config.variant);
  const Objective objective(layout, counts, config.prior, config.execution);
  const int n = layout.size();

  std::vector<double> theta(n, 0.0);
  std::vector<bool> free(n);
  for (int k = 0; k < n; ++k) free[k] = layout.active(k);
  ApplyFreeze(layout, config.freeze, theta, free);
  // A pinned strength still counts as free when looking for divergence.
  const std::vector<bool> diagnose = free;

  // Without a prior the likelihood is flat along the gauge direction unless a
  // frozen structural parameter breaks it; pin one log-strength in that case.
  if (config.prior.weight == 0) {
    const std::vector<double> gauge = layout.GaugeDirection();
    bool flat = true;
    for (int k = 0; k < n; ++k) {
      if (layout.active(k) && !free[k] && gauge[k] != 0) flat = false;
    }
    if (flat) free[layout.strength(counts.pairs.front().home)] = false;
  }

  std::vector<int> idx;
  for (int k = 0; k < n; ++k) {
    if (free[k]) idx.push_back(k);
  }
  const int nf = static_cast<int>(idx.size());

  ConvergenceReport progress;
  Evaluation ev = objective(theta, true);
  double f = ev.log_likelihood;
  progress.trace.push_back(f);
  int iter = 0;
  bool stalled = false;
  bool runaway = false;
  for (;; ++iter) {
    Eigen::VectorXd g(nf);
    for (int a = 0; a < nf; ++a) g(a) = ev.gradient[idx[a]];
    progress.gradient_norm = nf == 0 ? 0.0 : g.lpNorm<Eigen::Infinity>();
    if (progress.gradient_norm <= config.gradient_tolerance) {
      progress.converged = true;
      break;
    }
    if (iter >= config.max_iterations) break;
    for (int k : idx) {
      if (std::abs(theta[k]) > kStopBound) runaway = true;
    }
    if (runaway) break;

    // Newton direction on the negated (positive semi-definite) Hessian, with a
    // ridge that grows until the factorization succeeds.
    Eigen::MatrixXd info(nf, nf);
    for (int a = 0; a < nf; ++a) {
      for (int b = 0; b < nf; ++b) {
        info(a, b) = -ev.hessian[static_cast<size_t>(idx[a]) * n + idx[b]];
      }
    }
    const double scale = 1.0 + info.diagonal().cwiseAbs().maxCoeff();
    double ridge = 1e-12 * scale;
    Eigen::VectorXd d;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::LLT<Eigen::MatrixXd> llt(
          info + ridge * Eigen::MatrixXd::Identity(nf, nf));
      if (llt.info() == Eigen::Success) {
        d = llt.solve(g);
        if (d.allFinite() && g.dot(d) > 0) break;
      }
      d.resize(0);
      ridge *= 10;
    }
    if (d.size() == 0) d = g;  // steepest ascent
    const double longest = d.lpNorm<Eigen::Infinity>();
    double t = longest > kMaxStep ? kMaxStep / longest : 1.0;
    const double predicted = g.dot(d);

    std::vector<double> candidate = theta;
    bool accepted = false;
    double fc = f;
    for (int ls = 0; ls < 60; ++ls) {
      for (int a = 0; a < nf; ++a) candidate[idx[a]] = theta[idx[a]] + t * d(a);
      fc = objective(candidate, false).log_likelihood;
      if (std::isfinite(fc) && fc >= f + 1e-4 * t * predicted) {
        accepted = true;
        break;
      }
      // Near the optimum the predicted gain drops below the rounding noise of
      // the log-likelihood; accept a step that does not lose more than that.
      const double noise = 1e-12 * (1.0 + std::abs(f));
      if (t * predicted <= 10 * noise && fc >= f - noise) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    theta.swap(candidate);
    f = fc;
    progress.trace.push_back(f);
    ev = objective(theta, true);
  }

  FittedModel model;
  model.variant = config.variant;
  for (TeamId i = 0; i < m; ++i) model.team_names.push_back(TeamName(teams, i));
  model.prior = config.prior;
  model.freeze = config.freeze;
  model.raw_parameters = layout.FromLog(theta);
  model.parameters = GaugeTransform(model.raw_parameters,
                                    SolveScale(model.raw_parameters.strengths));

  ConvergenceReport report =
      Residuals(model.raw_parameters, counts, config.prior);
  report.converged = progress.converged;
  report.iterations = iter;
  report.gradient_norm = progress.gradient_norm;
  report.log_likelihood = f;
  report.trace = std::move(progress.trace);
  // Frozen totals have no stationarity condition.
  for (StatResidual& s : report.totals) {
    const int k =
        s.name == "narrow"        ? layout.structural(ParamLayout::kRhoN)
        : s.name == "draws"       ? layout.structural(ParamLayout::kRhoD)
        : s.name == "both_bonus"  ? layout.structural(ParamLayout::kTauB)
        : s.name == "zero_bonus"  ? layout.structural(ParamLayout::kTauZ)
        : s.name == "try_bonuses" ? layout.structural(ParamLayout::kTau)
                                  : layout.structural(ParamLayout::kKappa);
    s.free = free[k];
  }
  model.report = std::move(report);

  std::vector<std::string> diverging = BoundaryDiagnosis(
      layout, objective.design(), diagnose, config.prior, teams);
  for (int k : idx) {
    if (std::abs(theta[k]) > kDivergenceBound && diverging.empty()) {
      diverging.push_back(layout.Label(k, teams) +
                          " is drifting without bound; supply a prior weight "
                          "or freeze structural parameters");
    }
  }
  if (!diverging.empty() || !model.report.converged) {
    std::ostringstream msg;
    msg << "fit did not converge after " << iter << " iterations (max |score| "
        << model.report.gradient_norm << ")";
    if (stalled && diverging.empty()) msg << "; line search stalled";
    for (const std::string& d : diverging) msg << "; " << d;
    model.report.converged = false;
    throw FitError(msg.str(), std::move(model), std::move(diverging));
  }
  return model;
}

FittedModel FreezeAndRefit(const OutcomeCounts& counts,
                           const StructuralFreeze& fixed, FitConfig config,
                           const TeamIndex* teams) {
  const ParamLayout layout(counts.num_teams, config.variant);
  const std::optional<double>* values[] = {&fixed.rho_n, &fixed.rho_d,
                                           &fixed.tau_b, &fixed.tau_z,
                                           &fixed.tau,   &fixed.kappa};
  for (int s = 0; s < ParamLayout::kNumStructural; ++s) {
    const int k = layout.structural(static_cast<ParamLayout::Structural>(s));
    if (layout.active(k) && !values[s]->has_value()) {
      throw Error("freeze_and_refit needs a value for " + layout.Label(k));
    }
  }
  config.freeze = fixed;
  return Fit(counts, config, teams);
}

}  // namespace rugbyrank
