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

#include "rugbyrank/ingest.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace rugbyrank {
namespace {

constexpr int kPointsPerTry = 5;

const std::vector<std::string>& MatchColumns() {
  static const std::vector<std::string> kColumns = {
      "date",       "home_team",  "away_team", "home_score",     "away_score",
      "home_tries", "away_tries", "venue",     "declared_result"};
  return kColumns;
}

}  // namespace

// Accepts LF or CRLF line ends and a missing final newline.
std::vector<std::vector<std::string>> SplitCsvRecords(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  size_t i = 0;
  auto end_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(fields));
    fields.clear();
    was_quoted = false;
  };
  if (text.starts_with("\xEF\xBB\xBF")) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c != '"') {
        field += c;
      } else if (i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else {
        quoted = false;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || was_quoted) {
          throw ParseError("row " + std::to_string(records.size()) +
                           ": stray quote inside an unquoted field");
        }
        quoted = true;
        was_quoted = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        was_quoted = false;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        if (was_quoted) {
          throw ParseError("row " + std::to_string(records.size()) +
                           ": text after closing quote");
        }
        field += c;
    }
  }
  if (quoted) {
    throw ParseError("row " + std::to_string(records.size()) +
                     ": unterminated quoted field");
  }
  if (!field.empty() || !fields.empty() || was_quoted) end_record();
  // Blank lines carry no data.
  std::erase_if(records, [](const std::vector<std::string>& r) {
    return r.size() == 1 && r[0].empty();
  });
  return records;
}

namespace {

std::string Quote(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return Lower(a) == Lower(b);
}

std::optional<int> ParseCount(std::string_view cell, int row,
                              std::string_view column) {
  const std::string_view t = Trim(cell);
  if (t.empty()) return std::nullopt;
  int value = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || end != t.data() + t.size()) {
    throw ParseError("row " + std::to_string(row) + ", column " +
                     std::string(column) + ": '" + std::string(cell) +
                     "' is not an integer");
  }
  return value;
}

std::string Show(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string Join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += ';';
    out += parts[i];
  }
  return out;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ';') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

enum class Declared {
  kNone,
  kWon,
  kDraw,
  kLoss,
  kAwardedWin,
  kAwardedLoss,
  kUnknown
};

Declared ParseDeclared(std::string_view s) {
  const std::string_view t = Trim(s);
  if (t.empty()) return Declared::kNone;
  if (EqualsIgnoreCase(t, kDeclaredWon)) return Declared::kWon;
  if (EqualsIgnoreCase(t, kDeclaredDraw)) return Declared::kDraw;
  if (EqualsIgnoreCase(t, kDeclaredLoss)) return Declared::kLoss;
  if (EqualsIgnoreCase(t, kDeclaredAwardedWin)) return Declared::kAwardedWin;
  if (EqualsIgnoreCase(t, kDeclaredAwardedLoss)) return Declared::kAwardedLoss;
  return Declared::kUnknown;
}

// -1, 0, +1 for a home loss, draw, home win.
int Sign(int a, int b) { return (a > b) - (a < b); }

int DeclaredSign(Declared d) {
  switch (d) {
    case Declared::kWon:
    case Declared::kAwardedWin:
      return 1;
    case Declared::kLoss:
    case Declared::kAwardedLoss:
      return -1;
    default:
      return 0;
  }
}

std::optional<Venue> ParseVenue(std::string_view s) {
  const std::string_view t = Trim(s);
  if (EqualsIgnoreCase(t, "home")) return Venue::kHomeGround;
  if (EqualsIgnoreCase(t, "neutral")) return Venue::kNeutral;
  return std::nullopt;
}

bool TriesFit(const std::optional<int>& score,
              const std::optional<int>& tries) {
  return !score || !tries || *score >= kPointsPerTry * *tries;
}

// Reason the row is unusable, or empty if it is clean.
std::string Inconsistency(const RawMatchRow& r) {
  if (!r.home_score || !r.away_score) return "score missing";
  if (!r.home_tries || !r.away_tries) return "try count missing";
  if (*r.home_score < 0 || *r.away_score < 0 || *r.home_tries < 0 ||
      *r.away_tries < 0) {
    return "negative score or try count";
  }
  if (!ParseVenue(r.venue)) return "unknown venue '" + r.venue + "'";
  if (!TriesFit(r.home_score, r.home_tries) ||
      !TriesFit(r.away_score, r.away_tries)) {
    return "score too low for the number of tries";
  }
  const Declared d = ParseDeclared(r.declared_result);
  switch (d) {
    case Declared::kUnknown:
      return "unknown declared result '" + r.declared_result + "'";
    case Declared::kNone:
      return "";
    case Declared::kAwardedWin:
    case Declared::kAwardedLoss:
      if (*r.home_score != 0 || *r.away_score != 0 || *r.home_tries != 0 ||
          *r.away_tries != 0) {
        return "awarded match must have no score and no tries";
      }
      return "";
    default:
      if (DeclaredSign(d) != Sign(*r.home_score, *r.away_score)) {
        return "declared result '" + r.declared_result +
               "' contradicts the score " + Show(r.home_score) + "-" +
               Show(r.away_score);
      }
      return "";
  }
}

// Field accessors used when recording and replaying changes.
std::string GetField(const RawMatchRow& r, std::string_view name) {
  if (name == "home_score") return Show(r.home_score);
  if (name == "away_score") return Show(r.away_score);
  if (name == "home_tries") return Show(r.home_tries);
  if (name == "away_tries") return Show(r.away_tries);
  if (name == "venue") return r.venue;
  if (name == "declared_result") return r.declared_result;
  throw Error("unknown audit field '" + std::string(name) + "'");
}

void SetField(RawMatchRow& r, std::string_view name, const std::string& v) {
  auto count = [&]() -> std::optional<int> {
    return ParseCount(v, r.row, name);
  };
  if (name == "home_score") {
    r.home_score = count();
  } else if (name == "away_score") {
    r.away_score = count();
  } else if (name == "home_tries") {
    r.home_tries = count();
  } else if (name == "away_tries") {
    r.away_tries = count();
  } else if (name == "venue") {
    r.venue = v;
  } else if (name == "declared_result") {
    r.declared_result = v;
  } else {
    throw Error("unknown audit field '" + std::string(name) + "'");
  }
}

class RowCleaner {
 public:
  explicit RowCleaner(RawMatchRow row) : row_(std::move(row)) {}

  void Run() {
    R1();
    R2();
    R3();
    R4();
    R5();
  }

  const RawMatchRow& row() const { return row_; }
  std::vector<CleaningAction>& actions() { return actions_; }

 private:
  // Records the change from `before` to the current row over `fields`.
  void Record(const RawMatchRow& before, std::string rule,
              const std::vector<std::string>& fields, std::string description) {
    std::vector<std::string> was, now;
    for (const std::string& f : fields) {
      was.push_back(GetField(before, f));
      now.push_back(GetField(row_, f));
    }
    actions_.push_back({row_.row, std::move(rule), Join(fields), Join(was),
                        Join(now), std::move(description)});
  }

  void R1() {
    RawMatchRow& r = row_;
    const bool home_bad = !TriesFit(r.home_score, r.home_tries);
    const bool away_bad = !TriesFit(r.away_score, r.away_tries);
    if (!home_bad && !away_bad) return;
    const RawMatchRow before = r;
    if (r.home_tries && r.away_tries && TriesFit(r.home_score, r.away_tries) &&
        TriesFit(r.away_score, r.home_tries)) {
      std::swap(r.home_tries, r.away_tries);
      Record(before, "R1", {"home_tries", "away_tries"},
             "tries inconsistent with score; home and away try counts "
             "swapped");
      return;
    }
    std::vector<std::string> fields;
    if (home_bad) {
      r.home_tries = *r.home_score / kPointsPerTry;
      fields.push_back("home_tries");
    }
    if (away_bad) {
      r.away_tries = *r.away_score / kPointsPerTry;
      fields.push_back("away_tries");
    }
    Record(before, "R1", fields,
           "tries inconsistent with score; reduced to the most tries the "
           "score allows");
  }

  void R2() {
    if (Lower(Trim(row_.venue)) != "tbc") return;
    const RawMatchRow before = row_;
    row_.venue = "Neutral";
    Record(before, "R2", {"venue"}, "venue to be confirmed; set to Neutral");
  }

  void R3() {
    RawMatchRow& r = row_;
    const Declared d = ParseDeclared(r.declared_result);
    if (d != Declared::kWon && d != Declared::kLoss) return;
    if (r.home_score != 0 || r.away_score != 0) return;
    if (r.home_tries.value_or(0) != 0 || r.away_tries.value_or(0) != 0) return;
    const RawMatchRow before = r;
    const bool home = d == Declared::kWon;
    r.declared_result =
        std::string(home ? kDeclaredAwardedWin : kDeclaredAwardedLoss);
    Record(before, "R3", {"declared_result"},
           std::string("declared win without a score; awarded to ") +
               (home ? r.home_team : r.away_team) +
               " as a narrow win with no try bonuses");
  }

  void R4() {
    RawMatchRow& r = row_;
    std::vector<std::string> fields;
    const RawMatchRow before = r;
    if (!r.home_tries && r.home_score) {
      r.home_tries = *r.home_score / kPointsPerTry;
      fields.push_back("home_tries");
    }
    if (!r.away_tries && r.away_score) {
      r.away_tries = *r.away_score / kPointsPerTry;
      fields.push_back("away_tries");
    }
    if (fields.empty()) return;
    Record(before, "R4", fields,
           "try count blank; set to the most tries the score allows");
  }

  void R5() {
    RawMatchRow& r = row_;
    const Declared d = ParseDeclared(r.declared_result);
    if (d != Declared::kWon && d != Declared::kLoss) return;
    if (!r.home_score || !r.away_score || !r.home_tries || !r.away_tries) {
      return;
    }
    const int want = DeclaredSign(d);
    if (Sign(*r.home_score, *r.away_score) == want) return;
    if (Sign(*r.home_tries, *r.away_tries) != want) return;
    if (Sign(*r.away_score, *r.home_score) != want) return;
    if (!TriesFit(r.away_score, r.home_tries) ||
        !TriesFit(r.home_score, r.away_tries)) {
      return;
    }
    const RawMatchRow before = r;
    std::swap(r.home_score, r.away_score);
    Record(before, "R5", {"home_score", "away_score"},
           "score contradicts the declared result and the tries; score "
           "reversed");
  }

  RawMatchRow row_;
  std::vector<CleaningAction> actions_;
};

// Everything but the row number.
auto RowKey(const RawMatchRow& r) {
  return std::tie(r.date, r.home_team, r.away_team, r.home_score, r.away_score,
                  r.home_tries, r.away_tries, r.venue, r.declared_result);
}

}  // namespace

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<RawMatchRow> ParseMatchCsv(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto records = SplitCsvRecords(ss.str());
  if (records.empty()) throw ParseError("empty file: header row missing");
  const auto& columns = MatchColumns();
  const auto& header = records[0];
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string name(Trim(header[c]));
    if (c >= columns.size() || name != columns[c]) {
      const bool known =
          std::find(columns.begin(), columns.end(), name) != columns.end();
      throw ParseError("header column " + std::to_string(c + 1) + ": " +
                       (known ? "'" + name + "' out of order"
                              : "unknown column '" + name + "'") +
                       "; expected " + std::string(kMatchCsvHeader));
    }
  }
  if (header.size() != columns.size()) {
    throw ParseError("header: missing column '" + columns[header.size()] +
                     "'; expected " + std::string(kMatchCsvHeader));
  }
  std::vector<RawMatchRow> rows;
  for (size_t i = 1; i < records.size(); ++i) {
    const int row = static_cast<int>(i);
    const auto& f = records[i];
    if (f.size() != columns.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(columns.size()) + " fields, found " +
                       std::to_string(f.size()));
    }
    RawMatchRow r;
    r.row = row;
    r.date = f[0];
    r.home_team = std::string(Trim(f[1]));
    r.away_team = std::string(Trim(f[2]));
    if (r.home_team.empty() || r.away_team.empty()) {
      throw ParseError("row " + std::to_string(row) + ", column " +
                       (r.home_team.empty() ? "home_team" : "away_team") +
                       ": team name is empty");
    }
    r.home_score = ParseCount(f[3], row, columns[3]);
    r.away_score = ParseCount(f[4], row, columns[4]);
    r.home_tries = ParseCount(f[5], row, columns[5]);
    r.away_tries = ParseCount(f[6], row, columns[6]);
    r.venue = f[7];
    r.declared_result = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<RawMatchRow> ReadMatchCsv(const std::string& path) {
  std::istringstream in(ReadFile(path));
  return ParseMatchCsv(in);
}

void WriteMatchCsv(std::ostream& out, std::span<const RawMatchRow> rows) {
  out << kMatchCsvHeader << '\n';
  for (const RawMatchRow& r : rows) {
    out << Quote(r.date) << ',' << Quote(r.home_team) << ','
        << Quote(r.away_team) << ',' << Show(r.home_score) << ','
        << Show(r.away_score) << ',' << Show(r.home_tries) << ','
        << Show(r.away_tries) << ',' << Quote(r.venue) << ','
        << Quote(r.declared_result) << '\n';
  }
}

CleanResult Clean(std::span<const RawMatchRow> rows) {
  CleanResult result;
  std::map<decltype(RowKey(rows[0])), int> seen;
  for (const RawMatchRow& raw : rows) {
    const auto [it, fresh] = seen.emplace(RowKey(raw), raw.row);
    if (!fresh) {
      result.rejected.push_back(
          {raw.row, "exact duplicate of row " + std::to_string(it->second)});
      continue;
    }
    std::string reason;
    if (raw.home_team == raw.away_team) {
      reason = "team '" + raw.home_team + "' plays itself";
    } else if (!raw.home_score || !raw.away_score) {
      reason = "score missing";
    } else if (*raw.home_score < 0 || *raw.away_score < 0 ||
               raw.home_tries.value_or(0) < 0 ||
               raw.away_tries.value_or(0) < 0) {
      reason = "negative score or try count";
    }
    if (!reason.empty()) {
      result.rejected.push_back({raw.row, reason});
      continue;
    }
    RowCleaner cleaner(raw);
    cleaner.Run();
    reason = Inconsistency(cleaner.row());
    if (!reason.empty()) {
      result.rejected.push_back({raw.row, reason});
      continue;
    }
    result.rows.push_back(cleaner.row());
    auto& actions = cleaner.actions();
    result.actions.insert(result.actions.end(), actions.begin(), actions.end());
  }
  return result;
}

void WriteAuditCsv(std::ostream& out, std::span<const CleaningAction> actions) {
  out << kAuditCsvHeader << '\n';
  for (const CleaningAction& a : actions) {
    out << a.row << ',' << a.rule << ',' << Quote(a.field) << ','
        << Quote(a.before) << ',' << Quote(a.after) << ','
        << Quote(a.description) << '\n';
  }
}

std::vector<CleaningAction> ParseAuditCsv(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto records = SplitCsvRecords(ss.str());
  if (records.empty()) throw ParseError("empty audit file");
  std::string header;
  for (size_t c = 0; c < records[0].size(); ++c) {
    header += (c ? "," : "") + records[0][c];
  }
  if (header != kAuditCsvHeader) {
    throw ParseError("audit header must be " + std::string(kAuditCsvHeader));
  }
  std::vector<CleaningAction> out;
  for (size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    const int row = static_cast<int>(i);
    if (f.size() != 6) {
      throw ParseError("audit row " + std::to_string(row) +
                       ": expected 6 fields");
    }
    const auto n = ParseCount(f[0], row, "row");
    if (!n) throw ParseError("audit row " + std::to_string(row) + ": no row");
    out.push_back({*n, f[1], f[2], f[3], f[4], f[5]});
  }
  return out;
}

std::vector<RawMatchRow> ReplayAudit(std::span<const RawMatchRow> raw,
                                     std::span<const CleaningAction> actions) {
  std::vector<RawMatchRow> out(raw.begin(), raw.end());
  std::map<int, size_t> by_row;
  for (size_t i = 0; i < out.size(); ++i) by_row[out[i].row] = i;
  for (const CleaningAction& a : actions) {
    const auto it = by_row.find(a.row);
    if (it == by_row.end()) {
      throw Error("audit refers to unknown row " + std::to_string(a.row));
    }
    const auto fields = SplitList(a.field);
    const auto values = SplitList(a.after);
    if (fields.size() != values.size()) {
      throw Error("audit row " + std::to_string(a.row) +
                  ": field and value lists differ in length");
    }
    for (size_t k = 0; k < fields.size(); ++k) {
      SetField(out[it->second], fields[k], values[k]);
    }
  }
  return out;
}

Season ToSeason(std::span<const RawMatchRow> rows, const TeamIndex* teams) {
  Season season;
  if (teams != nullptr) season.teams = *teams;
  auto id = [&](const std::string& name, int row) {
    if (teams == nullptr) return season.teams.Intern(name);
    const auto found = season.teams.Find(name);
    if (!found) {
      throw Error("row " + std::to_string(row) + ": team '" + name +
                  "' is not in the model");
    }
    return *found;
  };
  for (const RawMatchRow& r : rows) {
    const std::string reason = Inconsistency(r);
    if (!reason.empty()) {
      throw Error("row " + std::to_string(r.row) + " is not clean: " + reason);
    }
    if (r.home_team == r.away_team) {
      throw Error("row " + std::to_string(r.row) + ": team plays itself");
    }
    MatchRecord m;
    m.home_team = id(r.home_team, r.row);
    m.away_team = id(r.away_team, r.row);
    m.home_score = *r.home_score;
    m.away_score = *r.away_score;
    m.home_tries = *r.home_tries;
    m.away_tries = *r.away_tries;
    m.venue = *ParseVenue(r.venue);
    m.date = r.date;
    const Declared d = ParseDeclared(r.declared_result);
    if (d == Declared::kAwardedWin)
      m.result_override = ResultOutcome::kHomeNarrow;
    if (d == Declared::kAwardedLoss) {
      m.result_override = ResultOutcome::kAwayNarrow;
    }
    season.matches.push_back(std::move(m));
  }
  return season;
}

}  // namespace rugbyrank
