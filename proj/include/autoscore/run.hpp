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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autoscore/core_model.hpp"
#include "autoscore/json.hpp"

namespace autoscore {

/// A response the agents could not score.
struct FailureRecord {
  std::string response_id;
  std::string error;    // error code name, e.g. "ReplayMiss"
  std::string message;
  std::optional<int> gold_score;

  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

Json ToJson(const FailureRecord& failure);
FailureRecord FailureRecordFromJson(const Json& j);

/// Identity of a run: what was scored, how, and against which data.
struct RunManifest {
  std::string item_id;
  Mode mode = Mode::kAutoscore;
  std::string model_name;
  std::string backend_identity;
  std::string dataset_digest;
  std::size_t dataset_size = 0;
  TaskContext context;
  /// Config snapshot (secrets never included).
  Json config = Json::object();
  std::string started_at;
  std::string finished_at;  // empty while the run is incomplete
};

Json ToJson(const RunManifest& manifest);
RunManifest RunManifestFromJson(const Json& j);

struct RunResult {
  std::vector<ScoredRecord> records;  // ordered by response id
  std::vector<FailureRecord> failures;  // ordered by response id
  RunManifest manifest;
  /// Response id to response text, from responses.jsonl when present.
  std::map<std::string, std::string, std::less<>> response_texts;
};

// Run directory layout.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kFailuresFile = "failures.jsonl";
inline constexpr const char* kTimingFile = "timing.csv";
inline constexpr const char* kResponsesFile = "responses.jsonl";

/// Reads a run directory (complete or not). Throws kIo when the manifest is
/// missing.
RunResult LoadRun(const std::filesystem::path& run_dir);

/// Serialized forms written at the end of a run.
std::string RecordsJsonl(const std::vector<ScoredRecord>& records);
std::string FailuresJsonl(const std::vector<FailureRecord>& failures);
std::string TimingCsv(const std::vector<ScoredRecord>& records);
/// {"response_id", "text"} per response, in response-id order.
std::string ResponsesJsonl(const std::vector<StudentResponse>& responses);

}  // namespace autoscore
