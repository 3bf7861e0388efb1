// Copyright 2026 The autoscore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "autoscore/error.hpp"

namespace autoscore {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDataset = 3;
inline constexpr int kExitBackend = 4;

/// Exit status for an error escaping a subcommand.
int ExitCodeFor(ErrorCode code);

/// Runs one invocation; `args` excludes the program name. Reports go to
/// `out`, diagnostics to `err`, logs to stderr.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// --help of the program followed by the --help of every subcommand.
std::string FullHelpText();

}  // namespace autoscore
