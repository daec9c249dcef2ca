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

#ifndef RUGBYRANK_INGEST_H_
#define RUGBYRANK_INGEST_H_

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rugbyrank/domain.h"

namespace rugbyrank {

// Malformed input file. The message names the data row (1-based, header not
// counted) and column when they are known.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Column order of match-result files, written and required exactly.
inline constexpr std::string_view kMatchCsvHeader =
    "date,home_team,away_team,home_score,away_score,home_tries,away_tries,"
    "venue,declared_result";
inline constexpr std::string_view kAuditCsvHeader =
    "row,rule,field,before,after,description";

// Declared results, from the home side's point of view. The two "Awarded"
// values mark matches granted without play.
inline constexpr std::string_view kDeclaredWon = "Won";
inline constexpr std::string_view kDeclaredDraw = "Draw";
inline constexpr std::string_view kDeclaredLoss = "Loss";
inline constexpr std::string_view kDeclaredAwardedWin = "AwardedWin";
inline constexpr std::string_view kDeclaredAwardedLoss = "AwardedLoss";

// One data row as entered. Missing numeric cells stay empty.
struct RawMatchRow {
  int row = 0;
  std::string date;
  std::string home_team;
  std::string away_team;
  std::optional<int> home_score;
  std::optional<int> away_score;
  std::optional<int> home_tries;
  std::optional<int> away_tries;
  std::string venue;  // "Home", "Neutral" or "tbc"
  std::string declared_result;

  friend bool operator==(const RawMatchRow&, const RawMatchRow&) = default;
};

// RFC 4180 records (header included). Blank lines are skipped.
std::vector<std::vector<std::string>> SplitCsvRecords(std::string_view text);

std::vector<RawMatchRow> ParseMatchCsv(std::istream& in);
std::vector<RawMatchRow> ReadMatchCsv(const std::string& path);
void WriteMatchCsv(std::ostream& out, std::span<const RawMatchRow> rows);

// One cleaning rule applied to one row. When a rule changes several fields
// they are listed together, separated by ';', in `field`, `before` and
// `after`.
struct CleaningAction {
  int row = 0;
  std::string rule;  // "R1" .. "R5"
  std::string field;
  std::string before;
  std::string after;
  std::string description;

  friend bool operator==(const CleaningAction&,
                         const CleaningAction&) = default;
};

struct RejectedRow {
  int row = 0;
  std::string reason;
};

struct CleanResult {
  // Accepted rows after cleaning, in input order.
  std::vector<RawMatchRow> rows;
  // Ordered by row, then rule.
  std::vector<CleaningAction> actions;
  std::vector<RejectedRow> rejected;
};

// Applies rules R1 to R5, in that order, to each row:
//   R1  a side scored fewer than 5 points per try: swap the try counts if
//       that makes both sides consistent, otherwise cut the offending side's
//       tries to floor(score / 5).
//   R2  venue "tbc" becomes "Neutral".
//   R3  a declared win with a 0-0 score and no tries becomes an awarded
//       narrow win for the declared winner with no try bonuses.
//   R4  a blank try count becomes floor(score / 5).
//   R5  the declared result contradicts the score but matches the try
//       counts, and reversing the score fixes it: reverse the score.
// Rows still inconsistent afterwards, and exact duplicates of an earlier row,
// are rejected with a reason.
CleanResult Clean(std::span<const RawMatchRow> rows);

void WriteAuditCsv(std::ostream& out, std::span<const CleaningAction> actions);
std::vector<CleaningAction> ParseAuditCsv(std::istream& in);

// Applies the recorded after-values to the raw rows. Rows with no actions are
// returned unchanged.
std::vector<RawMatchRow> ReplayAudit(std::span<const RawMatchRow> raw,
                                     std::span<const CleaningAction> actions);

// Converts cleaned rows into a season. Team ids follow first appearance
// unless `teams` is given, in which case every team must already be in it.
// Throws Error on a row that is not clean.
Season ToSeason(std::span<const RawMatchRow> rows,
                const TeamIndex* teams = nullptr);

// Reads a whole file, throwing ParseError if it cannot be opened.
std::string ReadFile(const std::string& path);

}  // namespace rugbyrank

#endif  // RUGBYRANK_INGEST_H_
