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

#include "rugbyrank/simulate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

namespace rugbyrank {
namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

uint64_t Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <size_t N>
int Draw(const std::array<double, N>& p, double u) {
  double acc = 0;
  for (size_t k = 0; k + 1 < N; ++k) {
    acc += p[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(N - 1);
}

double Median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> AverageRanks(std::span<const double> x) {
  const size_t n = x.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * (i + j) + 1;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::string Number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

FixtureList DoubleRoundRobin(int num_teams) {
  FixtureList out;
  for (TeamId i = 0; i < num_teams; ++i) {
    for (TeamId j = 0; j < num_teams; ++j) {
      if (i != j) out.push_back({i, j, Venue::kHomeGround});
    }
  }
  return out;
}

FixtureList Mirrored(const FixtureList& fixtures) {
  FixtureList out = fixtures;
  for (const Fixture& f : fixtures) out.push_back({f.away, f.home, f.venue});
  return out;
}

void SimConfig::Validate() const {
  if (replicates < 1) throw Error("replicates must be at least 1");
}

CounterRng::CounterRng(uint64_t seed, uint64_t replicate, uint64_t fixture)
    : key_(Mix(Mix(Mix(seed) ^ (replicate * kGolden + 1)) ^
               (fixture * kGolden + 2))) {}

uint64_t CounterRng::Next() { return Mix(key_ + kGolden * ++counter_); }

double CounterRng::Uniform() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

SampledMatch SampleMatch(const OutcomeDistribution& dist, CounterRng& rng) {
  const int r = Draw(dist.result, rng.Uniform());
  const int t = Draw(dist.tries, rng.Uniform());
  return {kAllResults[r], kAllTries[t]};
}

SampledMatch SampleMatch(const Parameters& params, TeamId home, TeamId away,
                         Venue venue, CounterRng& rng) {
  return SampleMatch(Distribution(params, home, away, venue), rng);
}

OutcomeCounts SimulateSeason(const Parameters& params,
                             const FixtureList& fixtures,
                             const SimConfig& config, int replicate) {
  params.Validate();
  const int m = params.num_teams();
  std::map<std::tuple<TeamId, TeamId, Venue>, PairCounts> pairs;
  for (size_t k = 0; k < fixtures.size(); ++k) {
    const Fixture& f = fixtures[k];
    if (f.home == f.away || f.home < 0 || f.away < 0 || f.home >= m ||
        f.away >= m) {
      throw Error("fixture " + std::to_string(k) + " is not a valid pairing");
    }
    CounterRng rng(config.seed, replicate, k);
    const SampledMatch s = SampleMatch(params, f.home, f.away, f.venue, rng);
    PairCounts& pc = pairs[{f.home, f.away, f.venue}];
    pc.home = f.home;
    pc.away = f.away;
    pc.venue = f.venue;
    pc.results[static_cast<int>(s.result)] += 1;
    pc.tries[static_cast<int>(s.tries)] += 1;
  }
  OutcomeCounts counts;
  counts.num_teams = m;
  for (auto& [key, pc] : pairs) counts.pairs.push_back(pc);
  return counts;
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("rank correlation needs equal sizes");
  const size_t n = a.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto ra = AverageRanks(a);
  const auto rb = AverageRanks(b);
  const double mean = 0.5 * (n + 1);
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < n; ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

RecoveryReport RecoveryStudy(const Parameters& truth,
                             const FixtureList& fixtures,
                             const SimConfig& config, const FitConfig& fit) {
  config.Validate();
  truth.Validate();
  if (truth.variant != fit.variant) {
    throw Error("truth and fit configuration use different variants");
  }
  const int m = truth.num_teams();
  RecoveryReport report;
  report.truth = GaugeTransform(truth, SolveScale(truth.strengths));
  for (TeamId i = 0; i < m; ++i) {
    report.team_names.push_back("team " + std::to_string(i));
  }
  report.rank_correlation_undefined =
      std::all_of(truth.strengths.begin(), truth.strengths.end(),
                  [&](double s) { return s == truth.strengths[0]; });
  report.replicates.resize(config.replicates);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < config.replicates; ++r) {
    ReplicateResult& out = report.replicates[r];
    out.replicate = r;
    try {
      const OutcomeCounts counts = SimulateSeason(truth, fixtures, config, r);
      FittedModel model;
      try {
        model = Fit(counts, fit);
        out.converged = true;
      } catch (const FitError& e) {
        out.error = e.what();
        model = e.best_iterate();
      }
      out.estimate = model.parameters;
      out.has_estimate = true;
      out.spearman = Spearman(truth.strengths, model.parameters.strengths);
    } catch (const std::exception& e) {
      out.error = e.what();
      out.spearman = std::numeric_limits<double>::quiet_NaN();
    }
  }

  const ParamLayout layout(m, truth.variant);
  const std::vector<double> truth_log = layout.ToLog(report.truth);
  std::vector<double> spearman;
  for (int s = 0; s < ParamLayout::kNumStructural; ++s) {
    const int k = layout.structural(static_cast<ParamLayout::Structural>(s));
    if (!layout.active(k)) continue;
    ParameterSummary sum;
    sum.name = layout.Label(k);
    sum.truth = std::exp(truth_log[k]);
    std::vector<double> values;
    for (const ReplicateResult& r : report.replicates) {
      if (r.has_estimate)
        values.push_back(std::exp(layout.ToLog(r.estimate)[k]));
    }
    sum.count = static_cast<int>(values.size());
    if (!values.empty()) {
      sum.median = Median(values);
      sum.mean =
          std::accumulate(values.begin(), values.end(), 0.0) / values.size();
      sum.bias = sum.mean - sum.truth;
      double ss = 0;
      for (double v : values) ss += (v - sum.mean) * (v - sum.mean);
      sum.sd = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;
    }
    report.structural.push_back(sum);
  }
  for (const ReplicateResult& r : report.replicates) {
    if (!r.converged) ++report.non_converged;
    if (r.has_estimate && !std::isnan(r.spearman)) {
      spearman.push_back(r.spearman);
    }
  }
  report.median_spearman = report.rank_correlation_undefined
                               ? std::numeric_limits<double>::quiet_NaN()
                               : Median(spearman);
  return report;
}

void WriteRecoveryCsv(std::ostream& out, const RecoveryReport& report) {
  out << "replicate,parameter,truth,estimate,converged\n";
  const int m = report.truth.num_teams();
  const ParamLayout layout(m, report.truth.variant);
  const TeamIndex teams(report.team_names);
  const std::vector<double> truth = layout.ToLog(report.truth);
  for (const ReplicateResult& r : report.replicates) {
    std::vector<double> est;
    if (r.has_estimate) est = layout.ToLog(r.estimate);
    for (int k = 0; k < layout.size(); ++k) {
      if (!layout.active(k)) continue;
      out << r.replicate << ',' << layout.Label(k, &teams) << ','
          << Number(std::exp(truth[k])) << ','
          << (r.has_estimate ? Number(std::exp(est[k])) : "") << ','
          << (r.converged ? 1 : 0) << '\n';
    }
  }
}

}  // namespace rugbyrank
