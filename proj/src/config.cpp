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

#include "autoscore/config.hpp"

#include <cstdlib>
#include <initializer_list>
#include <set>

#include "autoscore/error.hpp"
#include "autoscore/io.hpp"

namespace autoscore {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kConfig, where + ": " + what);
}

const Json& RequireObject(const Json& j, const std::string& where) {
  if (!j.is_object()) Fail(where, "expected an object");
  return j;
}

void RejectUnknownKeys(const Json& j, const std::string& where,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) Fail(where, "unknown key '" + key + "'");
  }
}

template <typename T>
std::optional<T> Get(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    Fail(where + "." + key, "wrong type");
  }
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

/// Inline text under `key`, or the contents of the file under `key`_file.
std::optional<std::string> TextOrFile(const Json& j, const std::string& key,
                                      const fs::path& base, const std::string& where) {
  auto inline_text = Get<std::string>(j, key.c_str(), where);
  auto file = Get<std::string>(j, (key + "_file").c_str(), where);
  if (inline_text && file) Fail(where, "both " + key + " and " + key + "_file given");
  if (file) {
    try {
      return io::ReadFile(Resolve(base, *file));
    } catch (const Error& e) {
      Fail(where + "." + key + "_file", e.what());
    }
  }
  return inline_text;
}

void ApplyTemplateOverride(PromptTemplate& t, const Json& j, const fs::path& base,
                           const std::string& where) {
  RequireObject(j, where);
  RejectUnknownKeys(j, where, {"system", "system_file", "user", "user_file"});
  if (auto s = TextOrFile(j, "system", base, where)) t.system_text = *s;
  if (auto u = TextOrFile(j, "user", base, where)) t.user_text = *u;
}

ItemConfig ParseItem(const std::string& id, const Json& j, const fs::path& base) {
  const std::string where = "items." + id;
  RequireObject(j, where);
  RejectUnknownKeys(j, where,
                    {"dataset", "question", "question_file", "reference_material",
                     "reference_material_file", "rubric", "rubric_file", "score_range", "schema",
                     "templates"});
  ItemConfig item;

  if (!j.contains("dataset")) Fail(where, "missing dataset");
  const Json& d = RequireObject(j["dataset"], where + ".dataset");
  RejectUnknownKeys(d, where + ".dataset", {"family", "path", "essay_set", "gold_rule"});
  auto family = Get<std::string>(d, "family", where + ".dataset");
  auto path = Get<std::string>(d, "path", where + ".dataset");
  auto essay_set = Get<int>(d, "essay_set", where + ".dataset");
  if (!family || !path || !essay_set) Fail(where + ".dataset", "family, path and essay_set required");
  try {
    item.dataset.family = ParseDatasetFamily(*family);
    item.dataset.gold_rule =
        ParseGoldRule(Get<std::string>(d, "gold_rule", where).value_or("first_rater"));
  } catch (const Error& e) {
    Fail(where + ".dataset", e.what());
  }
  item.dataset.tsv_path = Resolve(base, *path);
  item.dataset.essay_set = *essay_set;
  item.dataset.item_id = id;

  TaskContext& ctx = item.binding.context;
  ctx.item_id = id;
  auto question = TextOrFile(j, "question", base, where);
  auto rubric = TextOrFile(j, "rubric", base, where);
  if (!question) Fail(where, "missing question");
  if (!rubric) Fail(where, "missing rubric");
  ctx.question = *question;
  ctx.rubric_text = *rubric;
  ctx.reference_material = TextOrFile(j, "reference_material", base, where);

  auto range = Get<std::vector<int>>(j, "score_range", where);
  if (!range) {
    // Essay sets share one per-rater scale; short-answer sets differ.
    if (item.dataset.family == DatasetFamily::kAes) {
      range = std::vector<int>{1, 6};
    } else {
      Fail(where, "score_range required for sas items");
    }
  }
  if (range->size() != 2) Fail(where + ".score_range", "expected [min, max]");
  ctx.score_range = ScoreRange((*range)[0], (*range)[1]);
  try {
    ctx.Validate();
  } catch (const Error& e) {
    Fail(where, e.what());
  }

  if (j.contains("schema")) item.binding.schema = CompileSchema(id, j["schema"]);

  if (j.contains("templates")) {
    const Json& t = RequireObject(j["templates"], where + ".templates");
    RejectUnknownKeys(t, where + ".templates", {"extraction", "scoring", "baseline"});
    PromptSet& prompts = item.binding.prompts;
    if (t.contains("extraction")) {
      ApplyTemplateOverride(prompts.extraction, t["extraction"], base, where + ".templates.extraction");
    }
    if (t.contains("scoring")) {
      ApplyTemplateOverride(prompts.scoring, t["scoring"], base, where + ".templates.scoring");
    }
    if (t.contains("baseline")) {
      ApplyTemplateOverride(prompts.baseline, t["baseline"], base, where + ".templates.baseline");
    }
  }
  return item;
}

}  // namespace

BackendKind ParseBackendKind(std::string_view name) {
  if (name == "remote") return BackendKind::kRemote;
  if (name == "replay") return BackendKind::kReplay;
  if (name == "scripted") return BackendKind::kScripted;
  throw Error(ErrorCode::kConfig, "unknown backend '" + std::string(name) + "'");
}

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kRemote: return "remote";
    case BackendKind::kReplay: return "replay";
    case BackendKind::kScripted: return "scripted";
  }
  return "";
}

const ItemConfig& Config::Item(std::string_view item_id) const {
  auto it = items.find(item_id);
  if (it == items.end()) {
    std::string known;
    for (const auto& [id, item] : items) known += (known.empty() ? "" : ", ") + id;
    throw Error(ErrorCode::kConfig,
                "item '" + std::string(item_id) + "' is not registered (known: " + known + ")");
  }
  return it->second;
}

Config ParseConfig(const Json& document, const fs::path& base_dir) {
  RequireObject(document, "config");
  RejectUnknownKeys(document, "config", {"items", "backend", "run"});
  Config config;
  config.raw = document;

  if (!document.contains("items")) Fail("config", "missing items");
  for (const auto& [id, item] : RequireObject(document["items"], "items").items()) {
    config.items.emplace(id, ParseItem(id, item, base_dir));
  }

  if (document.contains("backend")) {
    const Json& b = RequireObject(document["backend"], "backend");
    RejectUnknownKeys(b, "backend",
                      {"base_url", "max_attempts", "base_delay_ms", "cache", "replay_fixture",
                       "scripted_rules"});
    BackendConfig& bc = config.backend;
    bc.base_url = Get<std::string>(b, "base_url", "backend").value_or("");
    bc.max_attempts = Get<int>(b, "max_attempts", "backend").value_or(bc.max_attempts);
    bc.base_delay_ms = Get<std::int64_t>(b, "base_delay_ms", "backend").value_or(bc.base_delay_ms);
    if (bc.max_attempts < 1) Fail("backend.max_attempts", "must be >= 1");
    if (bc.base_delay_ms < 0) Fail("backend.base_delay_ms", "must be >= 0");
    if (auto p = Get<std::string>(b, "cache", "backend")) bc.cache = Resolve(base_dir, *p);
    if (auto p = Get<std::string>(b, "replay_fixture", "backend")) {
      bc.replay_fixture = Resolve(base_dir, *p);
    }
    if (auto p = Get<std::string>(b, "scripted_rules", "backend")) {
      bc.scripted_rules = Resolve(base_dir, *p);
    }
  }

  if (document.contains("run")) {
    const Json& r = RequireObject(document["run"], "run");
    RejectUnknownKeys(r, "run",
                      {"model", "parallelism", "max_retries", "temperature", "max_output_tokens",
                       "seed"});
    RunSettings& rs = config.run;
    rs.agent.model_name = Get<std::string>(r, "model", "run").value_or(rs.agent.model_name);
    rs.parallelism = Get<int>(r, "parallelism", "run").value_or(rs.parallelism);
    rs.agent.max_retries = Get<int>(r, "max_retries", "run").value_or(rs.agent.max_retries);
    rs.agent.temperature = Get<double>(r, "temperature", "run").value_or(rs.agent.temperature);
    rs.agent.max_output_tokens =
        Get<int>(r, "max_output_tokens", "run").value_or(rs.agent.max_output_tokens);
    rs.seed = Get<std::uint64_t>(r, "seed", "run").value_or(rs.seed);
    if (rs.parallelism < 1) Fail("run.parallelism", "must be >= 1");
    if (rs.agent.max_retries < 0) Fail("run.max_retries", "must be >= 0");
    if (rs.agent.model_name.empty()) Fail("run.model", "must not be empty");
  }
  return config;
}

Config LoadConfig(const fs::path& path) {
  std::string text;
  try {
    text = io::ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  Json document;
  try {
    document = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  Config config = ParseConfig(document, path.parent_path());
  config.source = path;
  return config;
}

std::shared_ptr<ChatBackend> MakeBackend(const BackendConfig& config, BackendKind kind,
                                         int parallelism,
                                         std::shared_ptr<HttpTransport> transport) {
  switch (kind) {
    case BackendKind::kReplay:
      if (!config.replay_fixture) Fail("backend", "replay backend needs replay_fixture");
      try {
        return std::make_shared<ReplayBackend>(*config.replay_fixture);
      } catch (const Error& e) {
        Fail("backend.replay_fixture", e.what());
      }
    case BackendKind::kScripted:
      if (!config.scripted_rules) Fail("backend", "scripted backend needs scripted_rules");
      try {
        return ScriptedBackend::FromRulesFile(*config.scripted_rules);
      } catch (const Error& e) {
        Fail("backend.scripted_rules", e.what());
      }
    case BackendKind::kRemote: {
      if (config.base_url.empty()) Fail("backend", "remote backend needs base_url");
      RemoteOptions options;
      options.base_url = config.base_url;
      if (const char* key = std::getenv(kApiKeyEnv)) options.api_key = key;
      options.parallelism = parallelism;
      options.retry.max_attempts = config.max_attempts;
      options.retry.base_delay = std::chrono::milliseconds(config.base_delay_ms);
      if (!transport) transport = std::make_shared<HttplibTransport>();
      std::shared_ptr<ChatBackend> remote =
          std::make_shared<RemoteBackend>(std::move(options), std::move(transport));
      if (!config.cache) return remote;
      return std::make_shared<CachingBackend>(std::move(remote), *config.cache);
    }
  }
  Fail("backend", "unknown kind");
}

}  // namespace autoscore
