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

#ifndef RUGBYRANK_DOMAIN_H_
#define RUGBYRANK_DOMAIN_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace rugbyrank {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TeamId = int;

// League points awarded per match. Defaults are the most common professional
// system: 4 for a win, 2 for a draw, a losing bonus for a margin of seven or
// fewer, and a try bonus for scoring four or more tries.
struct PointsSystem {
  int win_points = 4;
  int draw_points = 2;
  int loss_points = 0;
  int losing_bonus_margin = 7;
  int try_bonus_threshold = 4;

  // Throws Error if the ordering or range invariants do not hold.
  void Validate() const;
};

enum class Venue { kHomeGround, kNeutral };

enum class ResultOutcome {
  kHomeWide,
  kHomeNarrow,
  kDraw,
  kAwayNarrow,
  kAwayWide
};
enum class TryOutcome { kBothBonus, kHomeBonus, kAwayBonus, kZeroBonus };

inline constexpr int kNumResultOutcomes = 5;
inline constexpr int kNumTryOutcomes = 4;

inline constexpr std::array<ResultOutcome, kNumResultOutcomes> kAllResults = {
    ResultOutcome::kHomeWide, ResultOutcome::kHomeNarrow, ResultOutcome::kDraw,
    ResultOutcome::kAwayNarrow, ResultOutcome::kAwayWide};
inline constexpr std::array<TryOutcome, kNumTryOutcomes> kAllTries = {
    TryOutcome::kBothBonus, TryOutcome::kHomeBonus, TryOutcome::kAwayBonus,
    TryOutcome::kZeroBonus};

std::string_view ResultName(ResultOutcome r);
std::string_view TryName(TryOutcome t);

// One fixture after cleaning. When `result_override` is set the match was
// awarded without a played score: the override is the result, no try bonuses
// are given, and the try outcome carries no evidence.
struct MatchRecord {
  TeamId home_team = 0;
  TeamId away_team = 0;
  int home_score = 0;
  int away_score = 0;
  int home_tries = 0;
  int away_tries = 0;
  Venue venue = Venue::kHomeGround;
  std::optional<ResultOutcome> result_override;
  std::string date;
};

// Team names with dense ids in order of first appearance.
class TeamIndex {
 public:
  TeamIndex() = default;
  explicit TeamIndex(std::vector<std::string> names);

  // Returns the id for `name`, adding it if unseen.
  TeamId Intern(const std::string& name);
  std::optional<TeamId> Find(const std::string& name) const;
  const std::string& Name(TeamId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  int size() const { return static_cast<int>(names_.size()); }

 private:
  std::vector<std::string> names_;
  std::map<std::string, TeamId> ids_;
};

struct Season {
  TeamIndex teams;
  std::vector<MatchRecord> matches;
};

ResultOutcome ClassifyResult(int home_score, int away_score,
                             const PointsSystem& ps);
TryOutcome ClassifyTry(int home_tries, int away_tries, const PointsSystem& ps);

struct MatchPoints {
  int home = 0;
  int away = 0;
  friend bool operator==(const MatchPoints&, const MatchPoints&) = default;
};

MatchPoints LeaguePoints(ResultOutcome r, TryOutcome t, const PointsSystem& ps);

// Result outcome of a record, honoring any override.
ResultOutcome RecordResult(const MatchRecord& m, const PointsSystem& ps);
// Try outcome of a record; overridden records always yield kZeroBonus.
TryOutcome RecordTry(const MatchRecord& m, const PointsSystem& ps);
MatchPoints RecordPoints(const MatchRecord& m, const PointsSystem& ps);

// Outcome frequencies for one ordered (home, away, venue) pairing. Try counts
// exclude awarded matches, so try_total() may be below result_total().
struct PairCounts {
  TeamId home = 0;
  TeamId away = 0;
  Venue venue = Venue::kHomeGround;
  std::array<double, kNumResultOutcomes> results{};
  std::array<double, kNumTryOutcomes> tries{};

  double result_total() const;
  double try_total() const;
};

struct OutcomeCounts {
  int num_teams = 0;
  // Sorted by (home, away, venue).
  std::vector<PairCounts> pairs;

  bool empty() const { return pairs.empty(); }
};

OutcomeCounts CountOutcomes(int num_teams, std::span<const MatchRecord> matches,
                            const PointsSystem& ps);

// Sufficient statistic (p, n, d, b, z, h).
struct SuffStats {
  std::vector<double> points;  // per team
  double narrow = 0;
  double draws = 0;
  double both_bonus = 0;
  double zero_bonus = 0;
  double home_minus_away = 0;
};

// Statistics as derived from counts under the default points system. This is
// what the likelihood sees.
SuffStats SufficientStats(const OutcomeCounts& counts);
SuffStats SufficientStats(int num_teams, std::span<const MatchRecord> matches,
                          const PointsSystem& ps);

// Points of each side, per result and try cell, under the default system.
// These are the exponents of the team strengths in the outcome weights.
inline constexpr std::array<MatchPoints, kNumResultOutcomes> kResultPoints = {
    MatchPoints{4, 0}, MatchPoints{4, 1}, MatchPoints{2, 2}, MatchPoints{1, 4},
    MatchPoints{0, 4}};
inline constexpr std::array<MatchPoints, kNumTryOutcomes> kTryPoints = {
    MatchPoints{1, 1}, MatchPoints{1, 0}, MatchPoints{0, 1}, MatchPoints{0, 0}};

}  // namespace rugbyrank

#endif  // RUGBYRANK_DOMAIN_H_
