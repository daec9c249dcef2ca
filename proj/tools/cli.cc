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

#include "cli.h"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rugbyrank/domain.h"
#include "rugbyrank/estimate.h"
#include "rugbyrank/ingest.h"
#include "rugbyrank/model.h"
#include "rugbyrank/rank.h"
#include "rugbyrank/serialize.h"
#include "rugbyrank/simulate.h"

namespace rugbyrank::cli {
namespace {

namespace fs = std::filesystem;

constexpr char kModelFormat[] = "rugbyrank-model";

// An output file could not be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string output;
  std::string audit;
  std::string model;
  std::string table;
  std::string truth;
  std::string fixtures;
  std::string report;
  std::string params;
  std::string manifest;
  double prior_weight = 4.0;
  double sim_prior_weight = 0.0;
  std::vector<std::string> variants;
  std::string freeze_file;
  std::string points_file;
  std::string prev_ranks_file;
  std::string merit_table;
  std::string comparison;
  int min_matches = 5;
  int max_iterations = 500;
  int replicates = 50;
  uint64_t seed = 0;
};

// What a run read and wrote, echoed next to its outputs.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> arguments;
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  json fit_config;
  PointsSystem points_system;
  std::optional<uint64_t> seed;
};

std::string Absolute(const std::string& path) {
  return fs::absolute(path).lexically_normal().string();
}

std::string Number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string Fixed(double x, int digits = 4) {
  if (std::isnan(x)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

void WriteOutput(const std::string& path,
                 const std::function<void(std::ostream&)>& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open " + path + " for writing");
  write(out);
  out.flush();
  if (!out) throw OutputError("failed while writing " + path);
}

void WriteJson(const std::string& path, const json& j) {
  WriteOutput(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

json ManifestJson(const RunManifest& m) {
  return {{"format", "rugbyrank-run-manifest"},
          {"version", 1},
          {"subcommand", m.subcommand},
          {"arguments", m.arguments},
          {"inputs", m.inputs},
          {"outputs", m.outputs},
          {"fit_config", m.fit_config},
          {"points_system", ToJson(m.points_system)},
          {"seed", m.seed ? json(*m.seed) : json(nullptr)}};
}

void WriteManifest(const RunManifest& m) {
  std::set<fs::path> dirs;
  for (const auto& [role, path] : m.outputs) {
    dirs.insert(fs::path(path).parent_path());
  }
  const json j = ManifestJson(m);
  for (const fs::path& dir : dirs) {
    WriteJson((dir / (m.subcommand + ".manifest.json")).string(), j);
  }
}

// "name_suffix.ext" next to `path`.
std::string Sibling(const std::string& path, const std::string& suffix) {
  const fs::path p(path);
  return (p.parent_path() /
          (p.stem().string() + suffix + p.extension().string()))
      .string();
}

VariantConfig ParseVariants(const std::vector<std::string>& names) {
  VariantConfig v;
  std::optional<TryModel> try_model;
  std::optional<HomeModel> home_model;
  auto set_try = [&](TryModel t, const std::string& name) {
    if (try_model && *try_model != t) {
      throw Error("--variant " + name + " conflicts with an earlier try model");
    }
    try_model = t;
  };
  auto set_home = [&](HomeModel h, const std::string& name) {
    if (home_model && *home_model != h) {
      throw Error("--variant " + name +
                  " conflicts with an earlier home model");
    }
    home_model = h;
  };
  for (const std::string& name : names) {
    if (name == "default") continue;
    if (name == "opposition-independent") {
      set_try(TryModel::kOppositionIndependent, name);
    } else if (name == "offensive-defensive") {
      set_try(TryModel::kOffensiveDefensive, name);
    } else if (name == "team-specific-home") {
      set_home(HomeModel::kTeamSpecific, name);
    } else if (name == "no-home") {
      set_home(HomeModel::kNone, name);
    } else {
      throw Error("unknown --variant '" + name +
                  "' (expected default, opposition-independent, "
                  "offensive-defensive, team-specific-home or no-home)");
    }
  }
  if (try_model) v.try_model = *try_model;
  if (home_model) v.home_model = *home_model;
  return v;
}

std::vector<std::string> VariantArgs(const VariantConfig& v) {
  std::vector<std::string> out;
  if (v.try_model == TryModel::kOppositionIndependent) {
    out.push_back("opposition-independent");
  }
  if (v.try_model == TryModel::kOffensiveDefensive) {
    out.push_back("offensive-defensive");
  }
  if (v.home_model == HomeModel::kTeamSpecific) {
    out.push_back("team-specific-home");
  }
  if (v.home_model == HomeModel::kNone) out.push_back("no-home");
  if (out.empty()) out.push_back("default");
  return out;
}

PointsSystem LoadPointsSystem(const std::string& path) {
  if (path.empty()) return PointsSystem{};
  return PointsSystemFromJson(ReadJsonFile(path));
}

bool IsModelDocument(const json& j) {
  return j.is_object() && j.contains("format") && j["format"] == kModelFormat;
}

// Accepts a parameters document or a fitted model.
Parameters LoadParameters(const std::string& path,
                          std::vector<std::string>* names) {
  const json j = ReadJsonFile(path);
  if (IsModelDocument(j)) {
    FittedModel m = FittedModelFromJson(j);
    *names = m.team_names;
    return m.parameters;
  }
  return ParametersFromJson(j, names);
}

json FitConfigJson(const FitConfig& c) {
  return {{"variant", ToJson(c.variant)},
          {"prior_weight", c.prior.weight},
          {"dummy_strength", c.prior.dummy_strength},
          {"gradient_tolerance", c.gradient_tolerance},
          {"max_iterations", c.max_iterations},
          {"freeze", ToJson(c.freeze)}};
}

void PrintInterpretation(std::ostream& out, const StructuralInterpretation& s) {
  struct Line {
    const char* label;
    double OutcomeSummary::* field;
  };
  static const Line kLines[] = {
      {"P(wide result)", &OutcomeSummary::wide},
      {"P(narrow result)", &OutcomeSummary::narrow},
      {"P(draw)", &OutcomeSummary::draw},
      {"P(home win)", &OutcomeSummary::home_win},
      {"P(away win)", &OutcomeSummary::away_win},
      {"home/away win ratio", &OutcomeSummary::home_away_win_ratio},
      {"P(both try bonuses)", &OutcomeSummary::both_bonus},
      {"P(no try bonus)", &OutcomeSummary::zero_bonus},
      {"P(home bonus only)", &OutcomeSummary::home_bonus_only},
      {"P(away bonus only)", &OutcomeSummary::away_bonus_only},
  };
  char buf[128];
  out << "Outcome propensities for two teams of unit strength:\n";
  std::snprintf(buf, sizeof(buf), "  %-22s %12s %12s\n", "", "home ground",
                "neutral");
  out << buf;
  for (const Line& l : kLines) {
    std::snprintf(buf, sizeof(buf), "  %-22s %12s %12s\n", l.label,
                  Fixed(s.with_home_advantage.*l.field).c_str(),
                  Fixed(s.neutral.*l.field).c_str());
    out << buf;
  }
}

json InterpretationJson(const StructuralInterpretation& s) {
  return {{"with_home_advantage", ToJson(s.with_home_advantage)},
          {"neutral", ToJson(s.neutral)}};
}

void PrintStructural(std::ostream& out, const Parameters& p) {
  out << "Structural parameters: rho_n=" << Fixed(p.rho_n)
      << " rho_d=" << Fixed(p.rho_d);
  if (p.variant.try_model == TryModel::kOppositionIndependent) {
    out << " tau=" << Fixed(p.extra.tau);
  } else {
    out << " tau_b=" << Fixed(p.tau_b) << " tau_z=" << Fixed(p.tau_z);
  }
  if (p.variant.home_model == HomeModel::kSingleKappa) {
    out << " kappa=" << Fixed(p.kappa);
  }
  out << '\n';
}

double MaxRelative(const std::vector<double>& observed,
                   const std::vector<double>& expected) {
  double worst = 0;
  for (size_t i = 0; i < observed.size() && i < expected.size(); ++i) {
    worst = std::max(worst, std::abs(observed[i] - expected[i]) /
                                std::max(1.0, std::abs(observed[i])));
  }
  return worst;
}

void PrintReport(std::ostream& out, const ConvergenceReport& r) {
  out << (r.converged ? "Converged" : "Stopped") << " after " << r.iterations
      << " iterations; max |score| = " << r.gradient_norm
      << ", log-likelihood = " << Number(r.log_likelihood) << '\n';
  out << "Retrodiction (max relative |observed - expected|):\n";
  out << "  team points        "
      << MaxRelative(r.observed_points, r.expected_points) << '\n';
  for (const StatResidual& s : r.totals) {
    out << "  " << s.name
        << std::string(std::max<size_t>(1, 19 - s.name.size()), ' ')
        << "observed " << Fixed(s.observed) << "  expected "
        << Fixed(s.expected) << (s.free ? "" : "  (frozen)") << '\n';
  }
}

void PrintTable(std::ostream& out, const RankingTable& t) {
  char buf[160];
  out << RankMethodName(t.method) << " ranking:\n";
  std::snprintf(buf, sizeof(buf), "  %4s  %-28s %8s %4s %4s %4s %4s %7s\n",
                "rank", "team", "rating", "P", "W", "D", "L", "LPPM");
  out << buf;
  for (const RankingRow& r : t.rows) {
    std::snprintf(buf, sizeof(buf), "  %4s  %-28s %8s %4d %4d %4d %4d %7s\n",
                  r.rank ? std::to_string(*r.rank).c_str() : "NR",
                  r.team.c_str(), Fixed(r.rating, 3).c_str(), r.record.played,
                  r.record.won, r.record.drawn, r.record.lost,
                  Fixed(r.lppm, 3).c_str());
    out << buf;
  }
}

int RunClean(const Options& o, std::ostream& out, std::ostream& err) {
  const std::vector<RawMatchRow> raw = ReadMatchCsv(o.input);
  const CleanResult result = Clean(raw);
  WriteOutput(o.output,
              [&](std::ostream& s) { WriteMatchCsv(s, result.rows); });
  WriteOutput(o.audit,
              [&](std::ostream& s) { WriteAuditCsv(s, result.actions); });

  RunManifest m;
  m.subcommand = "clean";
  m.arguments = {"clean", Absolute(o.input), Absolute(o.output),
                 Absolute(o.audit)};
  m.inputs = {{"matches", Absolute(o.input)}};
  m.outputs = {{"cleaned", Absolute(o.output)}, {"audit", Absolute(o.audit)}};
  WriteManifest(m);

  std::map<std::string, int> per_rule;
  for (const CleaningAction& a : result.actions) ++per_rule[a.rule];
  out << raw.size() << " rows read, " << result.rows.size() << " accepted, "
      << result.rejected.size() << " rejected, " << result.actions.size()
      << " cleaning actions\n";
  for (const auto& [rule, n] : per_rule) {
    out << "  " << rule << ": " << n << '\n';
  }
  if (result.rejected.empty()) return kExitOk;
  for (const RejectedRow& r : result.rejected) {
    err << "rejected row " << r.row << ": " << r.reason << '\n';
  }
  return kExitRejectedRows;
}

int RunFit(const Options& o, std::ostream& out, std::ostream& err) {
  FitConfig cfg;
  cfg.variant = ParseVariants(o.variants);
  cfg.prior.weight = o.prior_weight;
  cfg.max_iterations = o.max_iterations;
  cfg.prior.Validate();
  if (cfg.max_iterations < 1) throw Error("--max-iterations must be positive");
  if (!o.freeze_file.empty()) {
    const json j = ReadJsonFile(o.freeze_file);
    cfg.freeze = IsModelDocument(j)
                     ? StructuralFreeze::All(FittedModelFromJson(j).parameters)
                     : FreezeFromJson(j);
  }
  const PointsSystem ps = LoadPointsSystem(o.points_file);
  const Season season = ToSeason(ReadMatchCsv(o.input));
  const OutcomeCounts counts =
      CountOutcomes(season.teams.size(), season.matches, ps);
  out << season.teams.size() << " teams, " << season.matches.size()
      << " matches; variant " << TryModelName(cfg.variant.try_model) << "/"
      << HomeModelName(cfg.variant.home_model) << ", prior weight "
      << cfg.prior.weight << '\n';

  FittedModel model;
  try {
    model = Fit(counts, cfg, &season.teams);
  } catch (const FitError& e) {
    err << "error: " << e.what() << '\n';
    if (!e.diverging().empty()) {
      err << "diverging parameters:";
      for (const std::string& d : e.diverging()) err << ' ' << d;
      err << '\n';
    }
    PrintReport(err, e.best_iterate().report);
    return kExitNotConverged;
  }
  WriteJson(o.model, ToJson(model));

  RunManifest m;
  m.subcommand = "fit";
  m.arguments = {"fit",
                 Absolute(o.input),
                 Absolute(o.model),
                 "--prior-weight",
                 Number(o.prior_weight),
                 "--max-iterations",
                 std::to_string(o.max_iterations)};
  for (const std::string& v : VariantArgs(cfg.variant)) {
    m.arguments.insert(m.arguments.end(), {"--variant", v});
  }
  m.inputs = {{"matches", Absolute(o.input)}};
  if (!o.freeze_file.empty()) {
    m.arguments.insert(m.arguments.end(),
                       {"--freeze-structural", Absolute(o.freeze_file)});
    m.inputs["freeze_structural"] = Absolute(o.freeze_file);
  }
  if (!o.points_file.empty()) {
    m.arguments.insert(m.arguments.end(),
                       {"--points-system", Absolute(o.points_file)});
    m.inputs["points_system"] = Absolute(o.points_file);
  }
  m.outputs = {{"model", Absolute(o.model)}};
  m.fit_config = FitConfigJson(cfg);
  m.points_system = ps;
  WriteManifest(m);

  PrintReport(out, model.report);
  PrintStructural(out, model.parameters);
  PrintInterpretation(out, InterpretStructural(model.parameters));
  return kExitOk;
}

int RunRank(const Options& o, std::ostream& out, std::ostream& err) {
  const FittedModel model = FittedModelFromJson(ReadJsonFile(o.model));
  const PointsSystem ps = LoadPointsSystem(o.points_file);
  const std::vector<RawMatchRow> rows = ReadMatchCsv(o.input);
  std::optional<PrevSeasonRanks> prev;
  if (!o.prev_ranks_file.empty()) prev = ReadPrevRanksCsv(o.prev_ranks_file);
  if (o.min_matches < 0) throw Error("--min-matches must not be negative");

  const std::set<std::string> in_model(model.team_names.begin(),
                                       model.team_names.end());
  std::set<std::string> in_data;
  for (const RawMatchRow& r : rows) {
    in_data.insert(r.home_team);
    in_data.insert(r.away_team);
  }
  if (in_model != in_data) {
    err << "error: teams in the match file and the model differ\n";
    for (const std::string& t : in_data) {
      if (!in_model.contains(t)) err << "  not in model: " << t << '\n';
    }
    for (const std::string& t : in_model) {
      if (!in_data.contains(t)) err << "  not in matches: " << t << '\n';
    }
    return kExitTeamMismatch;
  }

  const TeamIndex teams(model.team_names);
  const Season season = ToSeason(rows, &teams);
  const int m = teams.size();
  const std::vector<PlayingRecord> records =
      PlayingRecords(m, season.matches, ps);
  const RankingTable pppm =
      BuildTable(PppmAll(model.parameters), model.team_names, records,
                 RankMethod::kPppm, o.min_matches);
  WriteOutput(o.table, [&](std::ostream& s) { WriteTableCsv(s, pppm); });

  RunManifest manifest;
  manifest.subcommand = "rank";
  manifest.arguments = {"rank",
                        Absolute(o.model),
                        Absolute(o.input),
                        Absolute(o.table),
                        "--min-matches",
                        std::to_string(o.min_matches)};
  manifest.inputs = {{"model", Absolute(o.model)},
                     {"matches", Absolute(o.input)}};
  manifest.outputs = {{"table", Absolute(o.table)}};
  if (!o.points_file.empty()) {
    manifest.arguments.insert(manifest.arguments.end(),
                              {"--points-system", Absolute(o.points_file)});
    manifest.inputs["points_system"] = Absolute(o.points_file);
  }
  PrintTable(out, pppm);

  if (prev) {
    std::vector<double> merit(m, std::numeric_limits<double>::quiet_NaN());
    for (TeamId i = 0; i < m; ++i) {
      if (records[i].played > 0) {
        merit[i] = MeritPoints(season.matches, i, teams, *prev, ps);
      }
    }
    const RankingTable merit_table =
        BuildTable(merit, model.team_names, records, RankMethod::kMeritPoints,
                   o.min_matches);
    const RankComparison cmp = CompareRankings(merit_table, pppm);
    const std::string merit_path =
        o.merit_table.empty() ? Sibling(o.table, "_merit") : o.merit_table;
    const std::string cmp_path =
        o.comparison.empty() ? Sibling(o.table, "_comparison") : o.comparison;
    WriteOutput(merit_path,
                [&](std::ostream& s) { WriteTableCsv(s, merit_table); });
    WriteOutput(cmp_path, [&](std::ostream& s) { WriteComparisonCsv(s, cmp); });
    manifest.arguments.insert(
        manifest.arguments.end(),
        {"--prev-ranks", Absolute(o.prev_ranks_file), "--merit-table",
         Absolute(merit_path), "--comparison", Absolute(cmp_path)});
    manifest.inputs["prev_ranks"] = Absolute(o.prev_ranks_file);
    manifest.outputs["merit_table"] = Absolute(merit_path);
    manifest.outputs["comparison"] = Absolute(cmp_path);
    out << '\n';
    PrintTable(out, merit_table);
    out << "\nMean absolute rank difference (MeritPoints vs PPPM) over "
        << cmp.rows.size()
        << " ranked teams: " << Fixed(cmp.mean_abs_difference, 3) << '\n';
  }
  manifest.points_system = ps;
  WriteManifest(manifest);
  return kExitOk;
}

int RunSimulate(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names;
  const Parameters truth = LoadParameters(o.truth, &names);
  const TeamIndex teams(names);
  const FixtureList fixtures = ReadFixturesCsv(o.fixtures, teams);
  if (fixtures.empty()) throw Error(o.fixtures + ": no fixtures");
  SimConfig sim;
  sim.seed = o.seed;
  sim.replicates = o.replicates;
  sim.Validate();
  FitConfig fit;
  fit.variant = truth.variant;
  fit.prior.weight = o.sim_prior_weight;
  fit.prior.Validate();

  RecoveryReport report = RecoveryStudy(truth, fixtures, sim, fit);
  report.team_names = names;
  WriteOutput(o.report, [&](std::ostream& s) { WriteRecoveryCsv(s, report); });

  RunManifest m;
  m.subcommand = "simulate";
  m.arguments = {"simulate",
                 Absolute(o.truth),
                 Absolute(o.fixtures),
                 Absolute(o.report),
                 "--replicates",
                 std::to_string(o.replicates),
                 "--seed",
                 std::to_string(o.seed),
                 "--prior-weight",
                 Number(o.sim_prior_weight)};
  m.inputs = {{"truth", Absolute(o.truth)}, {"fixtures", Absolute(o.fixtures)}};
  m.outputs = {{"report", Absolute(o.report)}};
  m.fit_config = FitConfigJson(fit);
  m.seed = o.seed;
  WriteManifest(m);

  char buf[160];
  out << sim.replicates << " replicates of " << fixtures.size()
      << " fixtures, seed " << sim.seed << '\n';
  std::snprintf(buf, sizeof(buf), "  %-10s %10s %10s %10s %10s\n", "parameter",
                "truth", "median", "bias", "sd");
  out << buf;
  for (const ParameterSummary& s : report.structural) {
    std::snprintf(buf, sizeof(buf), "  %-10s %10.4f %10.4f %10.4f %10.4f\n",
                  s.name.c_str(), s.truth, s.median, s.bias, s.sd);
    out << buf;
  }
  out << "  median Spearman correlation of strengths: "
      << (report.rank_correlation_undefined
              ? std::string("undefined (equal true strengths)")
              : Fixed(report.median_spearman))
      << '\n';
  if (report.non_converged == 0) return kExitOk;
  err << report.non_converged << " of " << sim.replicates
      << " replicate fits did not converge\n";
  return kExitNotConverged;
}

int RunInterpret(const Options& o, std::ostream& out) {
  std::vector<std::string> names;
  const Parameters p = LoadParameters(o.params, &names);
  const StructuralInterpretation s = InterpretStructural(p);
  WriteJson(o.output, InterpretationJson(s));

  RunManifest m;
  m.subcommand = "interpret";
  m.arguments = {"interpret", Absolute(o.params), Absolute(o.output)};
  m.inputs = {{"parameters", Absolute(o.params)}};
  m.outputs = {{"interpretation", Absolute(o.output)}};
  WriteManifest(m);

  PrintStructural(out, p);
  PrintInterpretation(out, s);
  return kExitOk;
}

int RunRerun(const Options& o, std::ostream& out, std::ostream& err) {
  const json j = ReadJsonFile(o.manifest);
  if (!j.is_object() || !j.contains("arguments") ||
      !j["arguments"].is_array()) {
    throw SchemaError(o.manifest + ": not a run manifest");
  }
  std::vector<std::string> args;
  for (const json& a : j["arguments"]) {
    if (!a.is_string()) throw SchemaError(o.manifest + ": bad argument list");
    args.push_back(a.get<std::string>());
  }
  if (args.empty() || args[0] == "rerun") {
    throw SchemaError(o.manifest + ": manifest does not name a subcommand");
  }
  return Main(args, out, err);
}

}  // namespace

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) {
  Options o;
  CLI::App app{"Multi-outcome Bradley-Terry ratings for rugby union."};
  app.name("rugbyrank");
  app.require_subcommand(1);

  CLI::App* clean = app.add_subcommand(
      "clean",
      "Apply the cleaning rules and write the cleaned CSV and audit log");
  clean->add_option("input", o.input, "raw match CSV")->required();
  clean->add_option("output", o.output, "cleaned match CSV")->required();
  clean->add_option("audit", o.audit, "audit CSV")->required();

  CLI::App* fit = app.add_subcommand("fit", "Fit the rating model");
  fit->add_option("input", o.input, "cleaned match CSV")->required();
  fit->add_option("model", o.model, "fitted model JSON to write")->required();
  fit->add_option("--prior-weight", o.prior_weight,
                  "weight of the symmetric prior (0 disables it)")
      ->capture_default_str();
  fit->add_option("--variant", o.variants,
                  "default, opposition-independent, offensive-defensive, "
                  "team-specific-home, no-home; repeat or comma-separate "
                  "to combine")
      ->delimiter(',')
      ->allow_extra_args(false);
  fit->add_option("--freeze-structural", o.freeze_file,
                  "JSON of structural values to hold fixed, or a fitted model");
  fit->add_option("--points-system", o.points_file,
                  "JSON overriding the default points system");
  fit->add_option("--max-iterations", o.max_iterations)->capture_default_str();

  CLI::App* rank = app.add_subcommand("rank", "Rank teams by projected points");
  rank->add_option("model", o.model, "fitted model JSON")->required();
  rank->add_option("input", o.input, "cleaned match CSV")->required();
  rank->add_option("table", o.table, "ranking CSV to write")->required();
  rank->add_option("--min-matches", o.min_matches,
                   "teams with fewer matches are shown as NR")
      ->capture_default_str();
  rank->add_option("--prev-ranks", o.prev_ranks_file,
                   "previous-season ranks CSV; adds the Merit Points table "
                   "and a comparison");
  rank->add_option("--merit-table", o.merit_table,
                   "Merit Points CSV (default: <table>_merit.csv)");
  rank->add_option("--comparison", o.comparison,
                   "comparison CSV (default: <table>_comparison.csv)");
  rank->add_option("--points-system", o.points_file,
                   "JSON overriding the default points system");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Simulate seasons from known parameters and refit them");
  simulate->add_option("truth", o.truth, "parameters or fitted model JSON")
      ->required();
  simulate->add_option("fixtures", o.fixtures, "fixture CSV")->required();
  simulate->add_option("report", o.report, "recovery CSV to write")->required();
  simulate->add_option("--replicates", o.replicates)->capture_default_str();
  simulate->add_option("--seed", o.seed)->capture_default_str();
  simulate
      ->add_option("--prior-weight", o.sim_prior_weight,
                   "prior weight used when refitting")
      ->capture_default_str();

  CLI::App* interpret = app.add_subcommand(
      "interpret", "Outcome propensities implied by the structural parameters");
  interpret->add_option("params", o.params, "parameters or fitted model JSON")
      ->required();
  interpret->add_option("output", o.output, "interpretation JSON to write")
      ->required();

  CLI::App* rerun =
      app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
  rerun->add_option("manifest", o.manifest, "manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (clean->parsed()) return RunClean(o, out, err);
    if (fit->parsed()) return RunFit(o, out, err);
    if (rank->parsed()) return RunRank(o, out, err);
    if (simulate->parsed()) return RunSimulate(o, out, err);
    if (interpret->parsed()) return RunInterpret(o, out);
    if (rerun->parsed()) return RunRerun(o, out, err);
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace rugbyrank::cli
