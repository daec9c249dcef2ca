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

#include "rugbyrank/domain.h"

#include <algorithm>
#include <cstdlib>

namespace rugbyrank {

void PointsSystem::Validate() const {
  if (!(win_points > draw_points && draw_points > loss_points &&
        loss_points >= 0)) {
    throw Error("points system requires win > draw > loss >= 0");
  }
  if (losing_bonus_margin < 0) {
    throw Error("losing bonus margin must be non-negative");
  }
  if (try_bonus_threshold < 1) {
    throw Error("try bonus threshold must be at least 1");
  }
}

std::string_view ResultName(ResultOutcome r) {
  switch (r) {
    case ResultOutcome::kHomeWide:
      return "HW";
    case ResultOutcome::kHomeNarrow:
      return "HN";
    case ResultOutcome::kDraw:
      return "DD";
    case ResultOutcome::kAwayNarrow:
      return "AN";
    case ResultOutcome::kAwayWide:
      return "AW";
  }
  return "?";
}

std::string_view TryName(TryOutcome t) {
  switch (t) {
    case TryOutcome::kBothBonus:
      return "both";
    case TryOutcome::kHomeBonus:
      return "home";
    case TryOutcome::kAwayBonus:
      return "away";
    case TryOutcome::kZeroBonus:
      return "zero";
  }
  return "?";
}

TeamIndex::TeamIndex(std::vector<std::string> names) {
  for (auto& n : names) Intern(n);
}

TeamId TeamIndex::Intern(const std::string& name) {
  auto [it, inserted] = ids_.emplace(name, static_cast<TeamId>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

std::optional<TeamId> TeamIndex::Find(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

ResultOutcome ClassifyResult(int home_score, int away_score,
                             const PointsSystem& ps) {
  const int margin = home_score - away_score;
  if (margin == 0) return ResultOutcome::kDraw;
  const bool narrow = std::abs(margin) <= ps.losing_bonus_margin;
  if (margin > 0) {
    return narrow ? ResultOutcome::kHomeNarrow : ResultOutcome::kHomeWide;
  }
  return narrow ? ResultOutcome::kAwayNarrow : ResultOutcome::kAwayWide;
}

TryOutcome ClassifyTry(int home_tries, int away_tries, const PointsSystem& ps) {
  const bool home = home_tries >= ps.try_bonus_threshold;
  const bool away = away_tries >= ps.try_bonus_threshold;
  if (home && away) return TryOutcome::kBothBonus;
  if (home) return TryOutcome::kHomeBonus;
  if (away) return TryOutcome::kAwayBonus;
  return TryOutcome::kZeroBonus;
}

MatchPoints LeaguePoints(ResultOutcome r, TryOutcome t,
                         const PointsSystem& ps) {
  MatchPoints p;
  switch (r) {
    case ResultOutcome::kHomeWide:
      p = {ps.win_points, ps.loss_points};
      break;
    case ResultOutcome::kHomeNarrow:
      p = {ps.win_points, ps.loss_points + 1};
      break;
    case ResultOutcome::kDraw:
      p = {ps.draw_points, ps.draw_points};
      break;
    case ResultOutcome::kAwayNarrow:
      p = {ps.loss_points + 1, ps.win_points};
      break;
    case ResultOutcome::kAwayWide:
      p = {ps.loss_points, ps.win_points};
      break;
  }
  if (t == TryOutcome::kBothBonus || t == TryOutcome::kHomeBonus) ++p.home;
  if (t == TryOutcome::kBothBonus || t == TryOutcome::kAwayBonus) ++p.away;
  return p;
}

ResultOutcome RecordResult(const MatchRecord& m, const PointsSystem& ps) {
  if (m.result_override) return *m.result_override;
  return ClassifyResult(m.home_score, m.away_score, ps);
}

TryOutcome RecordTry(const MatchRecord& m, const PointsSystem& ps) {
  if (m.result_override) return TryOutcome::kZeroBonus;
  return ClassifyTry(m.home_tries, m.away_tries, ps);
}

MatchPoints RecordPoints(const MatchRecord& m, const PointsSystem& ps) {
  return LeaguePoints(RecordResult(m, ps), RecordTry(m, ps), ps);
}

double PairCounts::result_total() const {
  double s = 0;
  for (double c : results) s += c;
  return s;
}

double PairCounts::try_total() const {
  double s = 0;
  for (double c : tries) s += c;
  return s;
}

OutcomeCounts CountOutcomes(int num_teams, std::span<const MatchRecord> matches,
                            const PointsSystem& ps) {
  std::map<std::tuple<TeamId, TeamId, Venue>, PairCounts> by_pair;
  for (const MatchRecord& m : matches) {
    if (m.home_team < 0 || m.home_team >= num_teams || m.away_team < 0 ||
        m.away_team >= num_teams) {
      throw Error("match references a team outside the index");
    }
    if (m.home_team == m.away_team) {
      throw Error("a team cannot play itself");
    }
    PairCounts& pc = by_pair[{m.home_team, m.away_team, m.venue}];
    pc.home = m.home_team;
    pc.away = m.away_team;
    pc.venue = m.venue;
    pc.results[static_cast<int>(RecordResult(m, ps))] += 1;
    if (!m.result_override) {
      pc.tries[static_cast<int>(RecordTry(m, ps))] += 1;
    }
  }
  OutcomeCounts out;
  out.num_teams = num_teams;
  out.pairs.reserve(by_pair.size());
  for (auto& [key, pc] : by_pair) out.pairs.push_back(pc);
  return out;
}

SuffStats SufficientStats(const OutcomeCounts& counts) {
  SuffStats s;
  s.points.assign(counts.num_teams, 0.0);
  for (const PairCounts& pc : counts.pairs) {
    const bool home_ground = pc.venue == Venue::kHomeGround;
    for (int r = 0; r < kNumResultOutcomes; ++r) {
      const double c = pc.results[r];
      if (c == 0) continue;
      s.points[pc.home] += c * kResultPoints[r].home;
      s.points[pc.away] += c * kResultPoints[r].away;
      if (home_ground) {
        s.home_minus_away +=
            c * (kResultPoints[r].home - kResultPoints[r].away);
      }
    }
    s.narrow += pc.results[1] + pc.results[3];
    s.draws += pc.results[2];
    for (int t = 0; t < kNumTryOutcomes; ++t) {
      const double c = pc.tries[t];
      if (c == 0) continue;
      s.points[pc.home] += c * kTryPoints[t].home;
      s.points[pc.away] += c * kTryPoints[t].away;
      if (home_ground) {
        s.home_minus_away += c * (kTryPoints[t].home - kTryPoints[t].away);
      }
    }
    s.both_bonus += pc.tries[0];
    s.zero_bonus += pc.tries[3];
  }
  return s;
}

SuffStats SufficientStats(int num_teams, std::span<const MatchRecord> matches,
                          const PointsSystem& ps) {
  SuffStats s;
  s.points.assign(num_teams, 0.0);
  for (const MatchRecord& m : matches) {
    const ResultOutcome r = RecordResult(m, ps);
    const TryOutcome t = RecordTry(m, ps);
    const MatchPoints p = LeaguePoints(r, t, ps);
    s.points[m.home_team] += p.home;
    s.points[m.away_team] += p.away;
    if (r == ResultOutcome::kHomeNarrow || r == ResultOutcome::kAwayNarrow) {
      s.narrow += 1;
    }
    if (r == ResultOutcome::kDraw) s.draws += 1;
    if (!m.result_override) {
      if (t == TryOutcome::kBothBonus) s.both_bonus += 1;
      if (t == TryOutcome::kZeroBonus) s.zero_bonus += 1;
    }
    if (m.venue == Venue::kHomeGround) s.home_minus_away += p.home - p.away;
  }
  return s;
}

}  // namespace rugbyrank
