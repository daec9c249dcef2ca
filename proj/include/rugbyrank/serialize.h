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

#ifndef RUGBYRANK_SERIALIZE_H_
#define RUGBYRANK_SERIALIZE_H_

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "rugbyrank/domain.h"
#include "rugbyrank/estimate.h"
#include "rugbyrank/ingest.h"
#include "rugbyrank/model.h"
#include "rugbyrank/rank.h"
#include "rugbyrank/simulate.h"

namespace rugbyrank {

// A JSON document is missing a required key or has one of the wrong type.
class SchemaError : public Error {
 public:
  using Error::Error;
};

using nlohmann::json;

json ToJson(const VariantConfig& v);
VariantConfig VariantFromJson(const json& j);

// Parameters with team names:
//   {"variant": {...}, "rho_n": .., "rho_d": .., "tau_b": .., "tau_z": ..,
//    "tau": .., "kappa": .., "teams": [{"name": .., "strength": ..,
//    "delta": .., "home_strength": .., "away_strength": ..}, ...]}
// Keys the variant does not use are omitted on output and ignored on input.
json ToJson(const Parameters& p, const std::vector<std::string>& names);
Parameters ParametersFromJson(const json& j, std::vector<std::string>* names);

json ToJson(const PointsSystem& ps);
// Keys present override the defaults; unknown keys are rejected.
PointsSystem PointsSystemFromJson(const json& j);

json ToJson(const StructuralFreeze& f);
StructuralFreeze FreezeFromJson(const json& j);

json ToJson(const ConvergenceReport& r);
ConvergenceReport ConvergenceReportFromJson(const json& j);

json ToJson(const FittedModel& m);
FittedModel FittedModelFromJson(const json& j);

json ToJson(const RankingTable& t);
json ToJson(const RankComparison& c);
json ToJson(const RecoveryReport& r);
json ToJson(const OutcomeSummary& s);

// Reads and parses a JSON file, throwing ParseError on I/O or syntax errors.
json ReadJsonFile(const std::string& path);
void WriteJsonFile(const std::string& path, const json& j);

// Fixture files: header "home_team,away_team,venue" with venue Home or
// Neutral. Team names must be in `teams`.
FixtureList ReadFixturesCsv(const std::string& path, const TeamIndex& teams);

// Previous-season ranks: header "team,rank".
PrevSeasonRanks ReadPrevRanksCsv(const std::string& path);

}  // namespace rugbyrank

#endif  // RUGBYRANK_SERIALIZE_H_
