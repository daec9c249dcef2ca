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

#ifndef RUGBYRANK_RANK_H_
#define RUGBYRANK_RANK_H_

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rugbyrank/domain.h"
#include "rugbyrank/model.h"

namespace rugbyrank {

enum class RankMethod { kPppm, kMeritPoints, kLppm };

std::string_view RankMethodName(RankMethod m);

struct PlayingRecord {
  int played = 0;
  int won = 0;
  int drawn = 0;
  int lost = 0;
  double league_points = 0;

  // League points per match. Throws Error if no matches were played.
  double lppm() const;
};

// Playing record per team id; awarded matches count as played.
std::vector<PlayingRecord> PlayingRecords(int num_teams,
                                          std::span<const MatchRecord> matches,
                                          const PointsSystem& ps);

// Projected points per match: expected league points of team i against every
// other team of the model, once at home and once away, averaged.
double Pppm(const Parameters& params, TeamId i);
std::vector<double> PppmAll(const Parameters& params);

double Lppm(std::span<const MatchRecord> matches, TeamId team,
            const PointsSystem& ps);

// Previous-season rank per team name. Teams not listed were unranked.
using PrevSeasonRanks = std::map<std::string, int>;

// Schedule-strength bonus for one fixture against an opponent that finished
// at `prev_rank`: 0.3 for 1-25, 0.2 for 26-50, 0.1 for 51-75, else 0.
// Returned in tenths of a point.
int AdditionalTenths(std::optional<int> prev_rank);

// LPPM plus the additional points over every fixture.
double MeritPoints(double lppm, std::span<const std::optional<int>> opponents);
double MeritPoints(std::span<const MatchRecord> matches, TeamId team,
                   const TeamIndex& teams, const PrevSeasonRanks& prev,
                   const PointsSystem& ps);

struct RankingRow {
  std::string team;
  double rating = 0;
  // Empty for teams flagged not ranked.
  std::optional<int> rank;
  PlayingRecord record;
  double lppm = 0;  // NaN for a team with no matches
  bool not_ranked = false;
};

struct RankingTable {
  RankMethod method = RankMethod::kPppm;
  // Ordered by rating, highest first; ties keep input order.
  std::vector<RankingRow> rows;

  const RankingRow* Find(std::string_view team) const;
};

// Teams with fewer than `min_matches` matches are kept in the table but
// flagged and left out of the rank numbering. Tied ratings share the better
// rank and the following rank is skipped.
RankingTable BuildTable(std::span<const double> ratings,
                        const std::vector<std::string>& team_names,
                        std::span<const PlayingRecord> records,
                        RankMethod method, int min_matches = 5);

struct RankComparison {
  struct Row {
    std::string team;
    int rank_a = 0;
    int rank_b = 0;
    int difference = 0;  // rank_b - rank_a
    double lppm = 0;
    double adjustment_a = 0;  // rating_a - lppm
    double adjustment_b = 0;  // rating_b - lppm
  };
  RankMethod method_a = RankMethod::kPppm;
  RankMethod method_b = RankMethod::kPppm;
  std::vector<Row> rows;  // in the order of table a
  double mean_abs_difference = 0;
};

// Compares two tables over the teams ranked in both. Throws Error if there
// are none.
RankComparison CompareRankings(const RankingTable& a, const RankingTable& b);

// Observed outcome frequencies, in the same form as the model interpretation.
// Only home-ground matches count towards the home/away win ratio.
OutcomeSummary ObservedSummary(const OutcomeCounts& counts);

void WriteTableCsv(std::ostream& out, const RankingTable& table);
void WriteComparisonCsv(std::ostream& out, const RankComparison& c);

}  // namespace rugbyrank

#endif  // RUGBYRANK_RANK_H_
