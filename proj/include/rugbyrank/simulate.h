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

#ifndef RUGBYRANK_SIMULATE_H_
#define RUGBYRANK_SIMULATE_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rugbyrank/domain.h"
#include "rugbyrank/estimate.h"
#include "rugbyrank/model.h"

namespace rugbyrank {

struct Fixture {
  TeamId home = 0;
  TeamId away = 0;
  Venue venue = Venue::kHomeGround;
  friend bool operator==(const Fixture&, const Fixture&) = default;
};

using FixtureList = std::vector<Fixture>;

// Every ordered pair once: each team hosts every other team.
FixtureList DoubleRoundRobin(int num_teams);
// The list followed by each fixture with home and away exchanged.
FixtureList Mirrored(const FixtureList& fixtures);

struct SimConfig {
  uint64_t seed = 0;
  int replicates = 1;

  void Validate() const;
};

// Counter-based generator: the stream for (seed, replicate, fixture) does not
// depend on how many other streams exist or in which order they are used.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t replicate, uint64_t fixture);

  uint64_t Next();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

struct SampledMatch {
  ResultOutcome result;
  TryOutcome tries;
};

SampledMatch SampleMatch(const OutcomeDistribution& dist, CounterRng& rng);
SampledMatch SampleMatch(const Parameters& params, TeamId home, TeamId away,
                         Venue venue, CounterRng& rng);

// Samples every fixture once and aggregates the outcomes. Fixture k draws
// from the stream (seed, replicate, k).
OutcomeCounts SimulateSeason(const Parameters& params,
                             const FixtureList& fixtures,
                             const SimConfig& config, int replicate = 0);

struct ReplicateResult {
  int replicate = 0;
  bool converged = false;
  // Fit failure message, empty on success.
  std::string error;
  // Normalized estimate; from the last iterate if the fit failed.
  Parameters estimate;
  bool has_estimate = false;
  // Spearman correlation of fitted against true strengths; NaN if undefined.
  double spearman = 0;
};

struct ParameterSummary {
  std::string name;
  double truth = 0;
  double median = 0;
  double mean = 0;
  double bias = 0;  // mean - truth
  double sd = 0;
  int count = 0;
};

struct RecoveryReport {
  // Normalized to a unit generalized mean.
  Parameters truth;
  std::vector<std::string> team_names;
  std::vector<ReplicateResult> replicates;
  // One entry per structural parameter of the variant, over replicates with
  // an estimate.
  std::vector<ParameterSummary> structural;
  double median_spearman = 0;
  // True strengths have no spread, so rank correlation is undefined.
  bool rank_correlation_undefined = false;
  int non_converged = 0;
};

// Simulates `config.replicates` seasons from `truth` and fits each one with
// `fit`. Replicates run in parallel; results do not depend on thread count.
RecoveryReport RecoveryStudy(const Parameters& truth,
                             const FixtureList& fixtures,
                             const SimConfig& config, const FitConfig& fit);

// Rank correlation with average ranks for ties; NaN if either side is
// constant.
double Spearman(std::span<const double> a, std::span<const double> b);

// Columns: replicate, parameter, truth, estimate, converged. One row per
// replicate per structural parameter and per team strength.
void WriteRecoveryCsv(std::ostream& out, const RecoveryReport& report);

}  // namespace rugbyrank

#endif  // RUGBYRANK_SIMULATE_H_
