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

#include "rugbyrank/rank.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace rugbyrank {
namespace {

std::string Fixed(double x, int digits) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string_view RankMethodName(RankMethod m) {
  switch (m) {
    case RankMethod::kPppm:
      return "PPPM";
    case RankMethod::kMeritPoints:
      return "MeritPoints";
    case RankMethod::kLppm:
      return "LPPM";
  }
  return "?";
}

double PlayingRecord::lppm() const {
  if (played == 0) throw Error("league points per match: no matches played");
  return league_points / played;
}

std::vector<PlayingRecord> PlayingRecords(int num_teams,
                                          std::span<const MatchRecord> matches,
                                          const PointsSystem& ps) {
  std::vector<PlayingRecord> out(num_teams);
  for (const MatchRecord& m : matches) {
    if (m.home_team < 0 || m.home_team >= num_teams || m.away_team < 0 ||
        m.away_team >= num_teams) {
      throw Error("match refers to an unknown team");
    }
    const MatchPoints p = RecordPoints(m, ps);
    const ResultOutcome r = RecordResult(m, ps);
    PlayingRecord& h = out[m.home_team];
    PlayingRecord& a = out[m.away_team];
    ++h.played;
    ++a.played;
    h.league_points += p.home;
    a.league_points += p.away;
    switch (r) {
      case ResultOutcome::kHomeWide:
      case ResultOutcome::kHomeNarrow:
        ++h.won;
        ++a.lost;
        break;
      case ResultOutcome::kDraw:
        ++h.drawn;
        ++a.drawn;
        break;
      default:
        ++h.lost;
        ++a.won;
    }
  }
  return out;
}

double Pppm(const Parameters& params, TeamId i) {
  const int m = params.num_teams();
  if (m < 2) throw Error("projected points need at least two teams");
  if (i < 0 || i >= m) throw Error("team id out of range");
  double total = 0;
  for (TeamId j = 0; j < m; ++j) {
    if (j == i) continue;
    total += ExpectedPoints(params, i, j, Venue::kHomeGround).first;
    total += ExpectedPoints(params, j, i, Venue::kHomeGround).second;
  }
  return total / (2.0 * (m - 1));
}

std::vector<double> PppmAll(const Parameters& params) {
  const int m = params.num_teams();
  if (m < 2) throw Error("projected points need at least two teams");
  std::vector<double> out(m);
#pragma omp parallel for schedule(dynamic)
  for (TeamId i = 0; i < m; ++i) out[i] = Pppm(params, i);
  return out;
}

double Lppm(std::span<const MatchRecord> matches, TeamId team,
            const PointsSystem& ps) {
  PlayingRecord rec;
  for (const MatchRecord& m : matches) {
    if (m.home_team != team && m.away_team != team) continue;
    const MatchPoints p = RecordPoints(m, ps);
    ++rec.played;
    rec.league_points += m.home_team == team ? p.home : p.away;
  }
  return rec.lppm();
}

int AdditionalTenths(std::optional<int> prev_rank) {
  if (!prev_rank) return 0;
  if (*prev_rank < 1) throw Error("previous-season ranks start at 1");
  if (*prev_rank <= 25) return 3;
  if (*prev_rank <= 50) return 2;
  if (*prev_rank <= 75) return 1;
  return 0;
}

double MeritPoints(double lppm, std::span<const std::optional<int>> opponents) {
  int tenths = 0;
  for (const auto& r : opponents) tenths += AdditionalTenths(r);
  if (tenths == 0) return lppm;
  return (10.0 * lppm + tenths) / 10.0;
}

double MeritPoints(std::span<const MatchRecord> matches, TeamId team,
                   const TeamIndex& teams, const PrevSeasonRanks& prev,
                   const PointsSystem& ps) {
  PlayingRecord rec;
  int tenths = 0;
  for (const MatchRecord& m : matches) {
    if (m.home_team != team && m.away_team != team) continue;
    const bool home = m.home_team == team;
    const MatchPoints p = RecordPoints(m, ps);
    ++rec.played;
    rec.league_points += home ? p.home : p.away;
    const auto it = prev.find(teams.Name(home ? m.away_team : m.home_team));
    if (it != prev.end()) tenths += AdditionalTenths(it->second);
  }
  const double lppm = rec.lppm();
  if (tenths == 0) return lppm;
  return (10.0 * rec.league_points + tenths * rec.played) / (10.0 * rec.played);
}

const RankingRow* RankingTable::Find(std::string_view team) const {
  for (const RankingRow& r : rows) {
    if (r.team == team) return &r;
  }
  return nullptr;
}

RankingTable BuildTable(std::span<const double> ratings,
                        const std::vector<std::string>& team_names,
                        std::span<const PlayingRecord> records,
                        RankMethod method, int min_matches) {
  const size_t m = ratings.size();
  if (team_names.size() != m || records.size() != m) {
    throw Error("ratings, names and records differ in length");
  }
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return ratings[a] > ratings[b]; });
  RankingTable table;
  table.method = method;
  int ranked = 0;
  double last = std::numeric_limits<double>::quiet_NaN();
  int last_rank = 0;
  for (size_t i : order) {
    RankingRow row;
    row.team = team_names[i];
    row.rating = ratings[i];
    row.record = records[i];
    row.lppm = records[i].played > 0 ? records[i].lppm()
                                     : std::numeric_limits<double>::quiet_NaN();
    row.not_ranked = records[i].played < min_matches;
    if (!row.not_ranked) {
      ++ranked;
      if (ratings[i] != last) last_rank = ranked;
      last = ratings[i];
      row.rank = last_rank;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RankComparison CompareRankings(const RankingTable& a, const RankingTable& b) {
  RankComparison c;
  c.method_a = a.method;
  c.method_b = b.method;
  double total = 0;
  for (const RankingRow& ra : a.rows) {
    if (!ra.rank) continue;
    const RankingRow* rb = b.Find(ra.team);
    if (rb == nullptr || !rb->rank) continue;
    RankComparison::Row row;
    row.team = ra.team;
    row.rank_a = *ra.rank;
    row.rank_b = *rb->rank;
    row.difference = row.rank_b - row.rank_a;
    row.lppm = ra.lppm;
    row.adjustment_a = ra.rating - ra.lppm;
    row.adjustment_b = rb->rating - ra.lppm;
    total += std::abs(row.difference);
    c.rows.push_back(std::move(row));
  }
  if (c.rows.empty()) throw Error("the two rankings share no ranked team");
  c.mean_abs_difference = total / c.rows.size();
  return c;
}

OutcomeSummary ObservedSummary(const OutcomeCounts& counts) {
  std::array<double, kNumResultOutcomes> res{};
  std::array<double, kNumTryOutcomes> tries{};
  double home_win = 0, away_win = 0;
  for (const PairCounts& pc : counts.pairs) {
    for (int r = 0; r < kNumResultOutcomes; ++r) res[r] += pc.results[r];
    for (int t = 0; t < kNumTryOutcomes; ++t) tries[t] += pc.tries[t];
    if (pc.venue == Venue::kHomeGround) {
      home_win += pc.results[0] + pc.results[1];
      away_win += pc.results[3] + pc.results[4];
    }
  }
  const double nr = std::accumulate(res.begin(), res.end(), 0.0);
  const double nt = std::accumulate(tries.begin(), tries.end(), 0.0);
  OutcomeSummary s;
  if (nr > 0) {
    s.wide = (res[0] + res[4]) / nr;
    s.narrow = (res[1] + res[3]) / nr;
    s.draw = res[2] / nr;
    s.home_win = (res[0] + res[1]) / nr;
    s.away_win = (res[3] + res[4]) / nr;
  }
  s.home_away_win_ratio = away_win > 0
                              ? home_win / away_win
                              : std::numeric_limits<double>::quiet_NaN();
  if (nt > 0) {
    s.both_bonus = tries[0] / nt;
    s.home_bonus_only = tries[1] / nt;
    s.away_bonus_only = tries[2] / nt;
    s.zero_bonus = tries[3] / nt;
  }
  return s;
}

void WriteTableCsv(std::ostream& out, const RankingTable& table) {
  out << "team,rating,rank,P,W,D,L,LPPM,flags\n";
  for (const RankingRow& r : table.rows) {
    out << CsvField(r.team) << ',' << Fixed(r.rating, 6) << ','
        << (r.rank ? std::to_string(*r.rank) : "") << ',' << r.record.played
        << ',' << r.record.won << ',' << r.record.drawn << ',' << r.record.lost
        << ',' << Fixed(r.lppm, 6) << ',' << (r.not_ranked ? "NR" : "") << '\n';
  }
}

void WriteComparisonCsv(std::ostream& out, const RankComparison& c) {
  out << "team,rank_" << RankMethodName(c.method_a) << ",rank_"
      << RankMethodName(c.method_b) << ",rank_difference,LPPM,adjustment_"
      << RankMethodName(c.method_a) << ",adjustment_"
      << RankMethodName(c.method_b) << '\n';
  for (const RankComparison::Row& r : c.rows) {
    out << CsvField(r.team) << ',' << r.rank_a << ',' << r.rank_b << ','
        << r.difference << ',' << Fixed(r.lppm, 6) << ','
        << Fixed(r.adjustment_a, 6) << ',' << Fixed(r.adjustment_b, 6) << '\n';
  }
}

}  // namespace rugbyrank
