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
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "autoscore/backend.hpp"
#include "autoscore/ingest.hpp"
#include "autoscore/json.hpp"
#include "autoscore/pipeline.hpp"

namespace autoscore {

/// One registered item: where its responses live and what the agents see.
struct ItemConfig {
  DatasetSpec dataset;
  ItemBinding binding;
};

enum class BackendKind { kRemote, kReplay, kScripted };

BackendKind ParseBackendKind(std::string_view name);  // throws kConfig
std::string_view BackendKindName(BackendKind kind);

struct BackendConfig {
  std::string base_url;
  int max_attempts = 5;
  std::int64_t base_delay_ms = 1000;
  std::optional<std::filesystem::path> cache;           // remote only
  std::optional<std::filesystem::path> replay_fixture;  // replay
  std::optional<std::filesystem::path> scripted_rules;  // scripted
};

struct RunSettings {
  int parallelism = 1;
  AgentOptions agent;
  std::uint64_t seed = 0;
};

/// The parsed config file. Relative paths inside it resolve against the
/// file's directory.
///
///   {
///     "items": {"<id>": {"dataset": {"family", "path", "essay_set",
///                                    "gold_rule"},
///                        "question" | "question_file",
///                        "reference_material" | "reference_material_file",
///                        "rubric" | "rubric_file",
///                        "score_range": [min, max],
///                        "schema": {"fields": [...]},
///                        "templates": {"extraction" | "scoring" | "baseline":
///                                      {"system_file", "user_file"}}}},
///     "backend": {"base_url", "max_attempts", "base_delay_ms", "cache",
///                 "replay_fixture", "scripted_rules"},
///     "run": {"model", "parallelism", "max_retries", "temperature",
///             "max_output_tokens", "seed"}
///   }
///
/// Unknown keys are rejected. API keys are never read from the file.
struct Config {
  std::filesystem::path source;
  std::map<std::string, ItemConfig, std::less<>> items;
  BackendConfig backend;
  RunSettings run;
  /// The file as parsed, recorded in run manifests.
  Json raw = Json::object();

  /// Throws kConfig for an unregistered id.
  const ItemConfig& Item(std::string_view item_id) const;
};

/// Throws kConfig (or kInvalidSchema / kInvalidRange for bad item
/// definitions) with the offending key in the message.
Config LoadConfig(const std::filesystem::path& path);
Config ParseConfig(const Json& document, const std::filesystem::path& base_dir);

/// Environment variable holding the remote API key.
inline constexpr const char* kApiKeyEnv = "AUTOSCORE_API_KEY";

/// Builds the backend named by `kind`. A remote backend is wrapped in a
/// CachingBackend when a cache path is configured. `transport` replaces the
/// HTTP client (tests). Throws kConfig when the kind's settings are missing.
std::shared_ptr<ChatBackend> MakeBackend(const BackendConfig& config, BackendKind kind,
                                         int parallelism,
                                         std::shared_ptr<HttpTransport> transport = nullptr);

}  // namespace autoscore
