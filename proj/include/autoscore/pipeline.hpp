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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "autoscore/agents.hpp"
#include "autoscore/backend.hpp"
#include "autoscore/ingest.hpp"
#include "autoscore/run.hpp"

namespace autoscore {

/// Everything bound to one registered item.
struct ItemBinding {
  TaskContext context;
  std::optional<ComponentSchema> schema;  // required in autoscore mode
  PromptSet prompts = PromptSet::Defaults();
};

struct RunConfig {
  Mode mode = Mode::kAutoscore;
  int parallelism = 1;
  AgentOptions agent;
  std::filesystem::path run_dir;
  std::uint64_t seed = 0;
  /// Snapshot stored in the manifest.
  Json snapshot = Json::object();
  /// Log a progress line every this many completed responses.
  std::size_t progress_every = 100;
};

/// Scores every response of `dataset` into a fresh run directory, with
/// `parallelism` workers sharing `backend`. Records and failures are
/// appended (fsync'd) as they complete and rewritten in response-id order
/// when the run finishes, together with timing.csv and the final manifest.
/// Agent failures are captured per response; only configuration problems
/// throw (kConfig, or kIo when the run directory already holds records).
RunResult ScoreDataset(const RunConfig& config, const Dataset& dataset,
                       const ItemBinding& item, ChatBackend& backend);

/// Continues an interrupted (or finished) run: responses already recorded as
/// scored or failed are skipped. Throws kManifestMismatch when the directory
/// belongs to a different mode, model, backend, item or dataset.
RunResult Resume(const RunConfig& config, const Dataset& dataset, const ItemBinding& item,
                 ChatBackend& backend);

}  // namespace autoscore
