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

#ifndef RUGBYRANK_TOOLS_CLI_H_
#define RUGBYRANK_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace rugbyrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // an output could not be written
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitRejectedRows = 3;
inline constexpr int kExitNotConverged = 4;
inline constexpr int kExitTeamMismatch = 5;

// Runs one command line. `args` excludes the program name. Human-readable
// summaries go to `out`, diagnostics to `err`; machine outputs only to files.
//
// Every subcommand writes "<subcommand>.manifest.json" into each directory it
// writes outputs to. `rerun <manifest>` replays the recorded command.
int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err);

}  // namespace rugbyrank::cli

#endif  // RUGBYRANK_TOOLS_CLI_H_
