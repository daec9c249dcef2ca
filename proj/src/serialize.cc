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

#include "rugbyrank/serialize.h"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rugbyrank {
namespace {

const json& Require(const json& j, const char* key) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) {
    throw SchemaError(std::string("missing key '") + key + "'");
  }
  return *it;
}

double GetDouble(const json& j, const char* key) {
  const json& v = Require(j, key);
  if (!v.is_number()) {
    throw SchemaError(std::string("key '") + key + "' must be a number");
  }
  return v.get<double>();
}

int GetInt(const json& j, const char* key) {
  const json& v = Require(j, key);
  if (!v.is_number_integer()) {
    throw SchemaError(std::string("key '") + key + "' must be an integer");
  }
  return v.get<int>();
}

bool GetBool(const json& j, const char* key) {
  const json& v = Require(j, key);
  if (!v.is_boolean()) {
    throw SchemaError(std::string("key '") + key + "' must be true or false");
  }
  return v.get<bool>();
}

std::string GetString(const json& j, const char* key) {
  const json& v = Require(j, key);
  if (!v.is_string()) {
    throw SchemaError(std::string("key '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::vector<double> GetDoubles(const json& j, const char* key) {
  const json& v = Require(j, key);
  if (!v.is_array()) {
    throw SchemaError(std::string("key '") + key + "' must be an array");
  }
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) {
      throw SchemaError(std::string("key '") + key +
                        "' must hold only numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

// NaN and infinities have no JSON form; they are written as null.
json Num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json OptionalJson(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> OptionalFrom(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw SchemaError(std::string("key '") + key + "' must be a number");
  }
  return it->get<double>();
}

json Summary(const ParameterSummary& s) {
  return {{"name", s.name},          {"truth", Num(s.truth)},
          {"median", Num(s.median)}, {"mean", Num(s.mean)},
          {"bias", Num(s.bias)},     {"sd", Num(s.sd)},
          {"count", s.count}};
}

std::vector<std::string> TeamNames(int m) {
  std::vector<std::string> names;
  for (int i = 0; i < m; ++i) names.push_back("team " + std::to_string(i));
  return names;
}

}  // namespace

json ToJson(const VariantConfig& v) {
  return {{"try_model", std::string(TryModelName(v.try_model))},
          {"home_model", std::string(HomeModelName(v.home_model))}};
}

VariantConfig VariantFromJson(const json& j) {
  VariantConfig v;
  try {
    v.try_model = ParseTryModel(GetString(j, "try_model"));
    v.home_model = ParseHomeModel(GetString(j, "home_model"));
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  return v;
}

json ToJson(const Parameters& p, const std::vector<std::string>& names) {
  const int m = p.num_teams();
  if (static_cast<int>(names.size()) != m) {
    throw Error("team name count does not match the parameters");
  }
  const bool od = p.variant.try_model == TryModel::kOffensiveDefensive;
  const bool oi = p.variant.try_model == TryModel::kOppositionIndependent;
  const bool ts = p.variant.home_model == HomeModel::kTeamSpecific;
  const bool kappa = p.variant.home_model == HomeModel::kSingleKappa;
  json j = {
      {"variant", ToJson(p.variant)}, {"rho_n", p.rho_n}, {"rho_d", p.rho_d}};
  if (oi) {
    j["tau"] = p.extra.tau;
  } else {
    j["tau_b"] = p.tau_b;
    j["tau_z"] = p.tau_z;
  }
  if (kappa) j["kappa"] = p.kappa;
  json teams = json::array();
  for (int i = 0; i < m; ++i) {
    json t = {{"name", names[i]}, {"strength", p.strengths[i]}};
    if (od) t["delta"] = p.extra.delta[i];
    if (ts) {
      t["home_strength"] = p.extra.home_strengths[i];
      t["away_strength"] = p.extra.away_strengths[i];
    }
    teams.push_back(std::move(t));
  }
  j["teams"] = std::move(teams);
  return j;
}

Parameters ParametersFromJson(const json& j, std::vector<std::string>* names) {
  Parameters p;
  p.variant = VariantFromJson(Require(j, "variant"));
  const bool od = p.variant.try_model == TryModel::kOffensiveDefensive;
  const bool oi = p.variant.try_model == TryModel::kOppositionIndependent;
  const bool ts = p.variant.home_model == HomeModel::kTeamSpecific;
  p.rho_n = GetDouble(j, "rho_n");
  p.rho_d = GetDouble(j, "rho_d");
  if (oi) {
    p.extra.tau = GetDouble(j, "tau");
  } else {
    p.tau_b = GetDouble(j, "tau_b");
    p.tau_z = GetDouble(j, "tau_z");
  }
  if (p.variant.home_model == HomeModel::kSingleKappa) {
    p.kappa = GetDouble(j, "kappa");
  }
  const json& teams = Require(j, "teams");
  if (!teams.is_array() || teams.empty()) {
    throw SchemaError("key 'teams' must be a non-empty array");
  }
  std::vector<std::string> team_names;
  for (const json& t : teams) {
    team_names.push_back(GetString(t, "name"));
    p.strengths.push_back(GetDouble(t, "strength"));
    if (od) p.extra.delta.push_back(GetDouble(t, "delta"));
    if (ts) {
      p.extra.home_strengths.push_back(GetDouble(t, "home_strength"));
      p.extra.away_strengths.push_back(GetDouble(t, "away_strength"));
    }
  }
  try {
    p.Validate();
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  if (names != nullptr) *names = std::move(team_names);
  return p;
}

json ToJson(const PointsSystem& ps) {
  return {{"win_points", ps.win_points},
          {"draw_points", ps.draw_points},
          {"loss_points", ps.loss_points},
          {"losing_bonus_margin", ps.losing_bonus_margin},
          {"try_bonus_threshold", ps.try_bonus_threshold}};
}

PointsSystem PointsSystemFromJson(const json& j) {
  if (!j.is_object()) throw SchemaError("points system must be an object");
  PointsSystem ps;
  for (const auto& [key, value] : j.items()) {
    int* field = nullptr;
    if (key == "win_points") field = &ps.win_points;
    if (key == "draw_points") field = &ps.draw_points;
    if (key == "loss_points") field = &ps.loss_points;
    if (key == "losing_bonus_margin") field = &ps.losing_bonus_margin;
    if (key == "try_bonus_threshold") field = &ps.try_bonus_threshold;
    if (field == nullptr) {
      throw SchemaError("unknown points system key '" + key + "'");
    }
    *field = GetInt(j, key.c_str());
  }
  try {
    ps.Validate();
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
  return ps;
}

json ToJson(const StructuralFreeze& f) {
  return {{"rho_n", OptionalJson(f.rho_n)}, {"rho_d", OptionalJson(f.rho_d)},
          {"tau_b", OptionalJson(f.tau_b)}, {"tau_z", OptionalJson(f.tau_z)},
          {"tau", OptionalJson(f.tau)},     {"kappa", OptionalJson(f.kappa)}};
}

StructuralFreeze FreezeFromJson(const json& j) {
  if (!j.is_object()) throw SchemaError("freeze must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "rho_n" && key != "rho_d" && key != "tau_b" && key != "tau_z" &&
        key != "tau" && key != "kappa") {
      throw SchemaError("unknown structural parameter '" + key + "'");
    }
  }
  StructuralFreeze f;
  f.rho_n = OptionalFrom(j, "rho_n");
  f.rho_d = OptionalFrom(j, "rho_d");
  f.tau_b = OptionalFrom(j, "tau_b");
  f.tau_z = OptionalFrom(j, "tau_z");
  f.tau = OptionalFrom(j, "tau");
  f.kappa = OptionalFrom(j, "kappa");
  return f;
}

json ToJson(const ConvergenceReport& r) {
  json totals = json::array();
  for (const StatResidual& s : r.totals) {
    totals.push_back({{"name", s.name},
                      {"observed", s.observed},
                      {"expected", s.expected},
                      {"free", s.free}});
  }
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"gradient_norm", Num(r.gradient_norm)},
          {"log_likelihood", Num(r.log_likelihood)},
          {"trace", r.trace},
          {"observed_points", r.observed_points},
          {"expected_points", r.expected_points},
          {"totals", std::move(totals)},
          {"observed_defensive", r.observed_defensive},
          {"expected_defensive", r.expected_defensive},
          {"observed_home_points", r.observed_home_points},
          {"expected_home_points", r.expected_home_points},
          {"observed_away_points", r.observed_away_points},
          {"expected_away_points", r.expected_away_points}};
}

ConvergenceReport ConvergenceReportFromJson(const json& j) {
  ConvergenceReport r;
  r.converged = GetBool(j, "converged");
  r.iterations = GetInt(j, "iterations");
  r.gradient_norm = GetDouble(j, "gradient_norm");
  r.log_likelihood = GetDouble(j, "log_likelihood");
  r.trace = GetDoubles(j, "trace");
  r.observed_points = GetDoubles(j, "observed_points");
  r.expected_points = GetDoubles(j, "expected_points");
  const json& totals = Require(j, "totals");
  if (!totals.is_array()) throw SchemaError("key 'totals' must be an array");
  for (const json& t : totals) {
    r.totals.push_back({GetString(t, "name"), GetDouble(t, "observed"),
                        GetDouble(t, "expected"), GetBool(t, "free")});
  }
  r.observed_defensive = GetDoubles(j, "observed_defensive");
  r.expected_defensive = GetDoubles(j, "expected_defensive");
  r.observed_home_points = GetDoubles(j, "observed_home_points");
  r.expected_home_points = GetDoubles(j, "expected_home_points");
  r.observed_away_points = GetDoubles(j, "observed_away_points");
  r.expected_away_points = GetDoubles(j, "expected_away_points");
  return r;
}

json ToJson(const FittedModel& m) {
  return {{"format", "rugbyrank-model"},
          {"version", 1},
          {"variant", ToJson(m.variant)},
          {"parameters", ToJson(m.parameters, m.team_names)},
          {"raw_parameters", ToJson(m.raw_parameters, m.team_names)},
          {"prior",
           {{"weight", m.prior.weight},
            {"dummy_strength", m.prior.dummy_strength}}},
          {"freeze", ToJson(m.freeze)},
          {"report", ToJson(m.report)}};
}

FittedModel FittedModelFromJson(const json& j) {
  if (GetString(j, "format") != "rugbyrank-model") {
    throw SchemaError("not a fitted model document");
  }
  if (GetInt(j, "version") != 1) {
    throw SchemaError("unsupported model version");
  }
  FittedModel m;
  m.variant = VariantFromJson(Require(j, "variant"));
  m.parameters = ParametersFromJson(Require(j, "parameters"), &m.team_names);
  std::vector<std::string> raw_names;
  m.raw_parameters =
      ParametersFromJson(Require(j, "raw_parameters"), &raw_names);
  if (raw_names != m.team_names || m.parameters.variant != m.variant ||
      m.raw_parameters.variant != m.variant) {
    throw SchemaError("parameter blocks disagree on teams or variant");
  }
  const json& prior = Require(j, "prior");
  m.prior.weight = GetDouble(prior, "weight");
  m.prior.dummy_strength = GetDouble(prior, "dummy_strength");
  m.freeze = FreezeFromJson(Require(j, "freeze"));
  m.report = ConvergenceReportFromJson(Require(j, "report"));
  return m;
}

json ToJson(const RankingTable& t) {
  json rows = json::array();
  for (const RankingRow& r : t.rows) {
    rows.push_back({{"team", r.team},
                    {"rating", Num(r.rating)},
                    {"rank", r.rank ? json(*r.rank) : json(nullptr)},
                    {"played", r.record.played},
                    {"won", r.record.won},
                    {"drawn", r.record.drawn},
                    {"lost", r.record.lost},
                    {"league_points", r.record.league_points},
                    {"lppm", Num(r.lppm)},
                    {"not_ranked", r.not_ranked}});
  }
  return {{"method", std::string(RankMethodName(t.method))},
          {"rows", std::move(rows)}};
}

json ToJson(const RankComparison& c) {
  json rows = json::array();
  for (const RankComparison::Row& r : c.rows) {
    rows.push_back({{"team", r.team},
                    {"rank_a", r.rank_a},
                    {"rank_b", r.rank_b},
                    {"difference", r.difference},
                    {"lppm", Num(r.lppm)},
                    {"adjustment_a", Num(r.adjustment_a)},
                    {"adjustment_b", Num(r.adjustment_b)}});
  }
  return {{"method_a", std::string(RankMethodName(c.method_a))},
          {"method_b", std::string(RankMethodName(c.method_b))},
          {"rows", std::move(rows)},
          {"mean_abs_difference", c.mean_abs_difference}};
}

json ToJson(const RecoveryReport& r) {
  json structural = json::array();
  for (const ParameterSummary& s : r.structural) {
    structural.push_back(Summary(s));
  }
  json replicates = json::array();
  for (const ReplicateResult& rep : r.replicates) {
    json e = {{"replicate", rep.replicate},
              {"converged", rep.converged},
              {"spearman", Num(rep.spearman)}};
    if (!rep.error.empty()) e["error"] = rep.error;
    replicates.push_back(std::move(e));
  }
  return {{"truth",
           ToJson(r.truth, r.team_names.empty() ? TeamNames(r.truth.num_teams())
                                                : r.team_names)},
          {"structural", std::move(structural)},
          {"median_spearman", Num(r.median_spearman)},
          {"rank_correlation_undefined", r.rank_correlation_undefined},
          {"non_converged", r.non_converged},
          {"replicates", std::move(replicates)}};
}

json ToJson(const OutcomeSummary& s) {
  return {{"wide", Num(s.wide)},
          {"narrow", Num(s.narrow)},
          {"draw", Num(s.draw)},
          {"home_win", Num(s.home_win)},
          {"away_win", Num(s.away_win)},
          {"home_away_win_ratio", Num(s.home_away_win_ratio)},
          {"both_bonus", Num(s.both_bonus)},
          {"zero_bonus", Num(s.zero_bonus)},
          {"home_bonus_only", Num(s.home_bonus_only)},
          {"away_bonus_only", Num(s.away_bonus_only)}};
}

json ReadJsonFile(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void WriteJsonFile(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path);
}

FixtureList ReadFixturesCsv(const std::string& path, const TeamIndex& teams) {
  const auto records = SplitCsvRecords(ReadFile(path));
  if (records.empty() || records[0] != std::vector<std::string>{
                                           "home_team", "away_team", "venue"}) {
    throw ParseError(path + ": header must be home_team,away_team,venue");
  }
  FixtureList out;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = path + ": row " + std::to_string(r);
    if (rec.size() != 3) throw ParseError(where + ": expected 3 fields");
    const auto home = teams.Find(rec[0]);
    const auto away = teams.Find(rec[1]);
    if (!home) throw ParseError(where + ": unknown team '" + rec[0] + "'");
    if (!away) throw ParseError(where + ": unknown team '" + rec[1] + "'");
    if (*home == *away) throw ParseError(where + ": a team cannot play itself");
    Venue venue;
    if (rec[2] == "Home") {
      venue = Venue::kHomeGround;
    } else if (rec[2] == "Neutral") {
      venue = Venue::kNeutral;
    } else {
      throw ParseError(where + ", column venue: '" + rec[2] +
                       "' is not Home or Neutral");
    }
    out.push_back({*home, *away, venue});
  }
  return out;
}

PrevSeasonRanks ReadPrevRanksCsv(const std::string& path) {
  const auto records = SplitCsvRecords(ReadFile(path));
  if (records.empty() ||
      records[0] != std::vector<std::string>{"team", "rank"}) {
    throw ParseError(path + ": header must be team,rank");
  }
  PrevSeasonRanks out;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = path + ": row " + std::to_string(r);
    if (rec.size() != 2) throw ParseError(where + ": expected 2 fields");
    int rank = 0;
    std::istringstream in(rec[1]);
    if (!(in >> rank) || !in.eof() || rank < 1) {
      throw ParseError(where + ", column rank: '" + rec[1] +
                       "' is not a positive integer");
    }
    if (!out.emplace(rec[0], rank).second) {
      throw ParseError(where + ": team '" + rec[0] + "' listed twice");
    }
  }
  return out;
}

}  // namespace rugbyrank
