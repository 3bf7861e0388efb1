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

#include "autoscore/run.hpp"

#include <algorithm>

#include "autoscore/error.hpp"
#include "autoscore/io.hpp"

namespace autoscore {

Json ToJson(const FailureRecord& f) {
  Json j = Json::object();
  j["response_id"] = f.response_id;
  j["error"] = f.error;
  j["message"] = f.message;
  j["gold_score"] = f.gold_score ? Json(*f.gold_score) : Json(nullptr);
  return j;
}

FailureRecord FailureRecordFromJson(const Json& j) {
  FailureRecord f;
  f.response_id = j.at("response_id").get<std::string>();
  f.error = j.at("error").get<std::string>();
  f.message = j.value("message", std::string());
  if (j.contains("gold_score") && !j["gold_score"].is_null()) {
    f.gold_score = j["gold_score"].get<int>();
  }
  return f;
}

Json ToJson(const RunManifest& m) {
  Json context = Json::object();
  context["question"] = m.context.question;
  context["reference_material"] =
      m.context.reference_material ? Json(*m.context.reference_material) : Json(nullptr);
  context["rubric_text"] = m.context.rubric_text;
  context["score_range"] = {m.context.score_range.min(), m.context.score_range.max()};

  Json j = Json::object();
  j["item_id"] = m.item_id;
  j["mode"] = ModeName(m.mode);
  j["model_name"] = m.model_name;
  j["backend"] = m.backend_identity;
  j["dataset_digest"] = m.dataset_digest;
  j["dataset_size"] = m.dataset_size;
  j["context"] = std::move(context);
  j["config"] = m.config;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at.empty() ? Json(nullptr) : Json(m.finished_at);
  return j;
}

RunManifest RunManifestFromJson(const Json& j) {
  RunManifest m;
  m.item_id = j.at("item_id").get<std::string>();
  m.mode = ParseMode(j.at("mode").get<std::string>());
  m.model_name = j.at("model_name").get<std::string>();
  m.backend_identity = j.at("backend").get<std::string>();
  m.dataset_digest = j.at("dataset_digest").get<std::string>();
  m.dataset_size = j.at("dataset_size").get<std::size_t>();
  const Json& c = j.at("context");
  m.context.item_id = m.item_id;
  m.context.question = c.at("question").get<std::string>();
  if (!c.at("reference_material").is_null()) {
    m.context.reference_material = c["reference_material"].get<std::string>();
  }
  m.context.rubric_text = c.at("rubric_text").get<std::string>();
  m.context.score_range =
      ScoreRange(c.at("score_range").at(0).get<int>(), c.at("score_range").at(1).get<int>());
  m.config = j.value("config", Json::object());
  m.started_at = j.value("started_at", std::string());
  if (j.contains("finished_at") && j["finished_at"].is_string()) {
    m.finished_at = j["finished_at"].get<std::string>();
  }
  return m;
}

RunResult LoadRun(const std::filesystem::path& run_dir) {
  const auto manifest_path = run_dir / kManifestFile;
  if (!std::filesystem::exists(manifest_path)) {
    throw Error(ErrorCode::kIo, "no " + std::string(kManifestFile) + " in " + run_dir.string());
  }
  RunResult result;
  try {
    result.manifest = RunManifestFromJson(Json::parse(io::ReadFile(manifest_path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, manifest_path.string() + ": " + e.what());
  }
  if (std::filesystem::exists(run_dir / kRecordsFile)) {
    for (const auto& line : io::ReadJsonLines(run_dir / kRecordsFile)) {
      result.records.push_back(ScoredRecordFromJson(line));
    }
  }
  if (std::filesystem::exists(run_dir / kFailuresFile)) {
    for (const auto& line : io::ReadJsonLines(run_dir / kFailuresFile)) {
      result.failures.push_back(FailureRecordFromJson(line));
    }
  }
  if (std::filesystem::exists(run_dir / kResponsesFile)) {
    for (const auto& line : io::ReadJsonLines(run_dir / kResponsesFile)) {
      result.response_texts[line.at("response_id").get<std::string>()] =
          line.at("text").get<std::string>();
    }
  }
  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    return ResponseIdLess(a.response_id, b.response_id);
  });
  std::sort(result.failures.begin(), result.failures.end(), [](const auto& a, const auto& b) {
    return ResponseIdLess(a.response_id, b.response_id);
  });
  return result;
}

std::string RecordsJsonl(const std::vector<ScoredRecord>& records) {
  std::string out;
  for (const auto& r : records) out += ToJson(r).dump() + "\n";
  return out;
}

std::string ResponsesJsonl(const std::vector<StudentResponse>& responses) {
  std::vector<const StudentResponse*> sorted;
  for (const auto& r : responses) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return ResponseIdLess(a->response_id, b->response_id);
  });
  std::string out;
  for (const auto* r : sorted) {
    Json line = {{"response_id", r->response_id}, {"text", r->text}};
    out += line.dump() + "\n";
  }
  return out;
}

std::string FailuresJsonl(const std::vector<FailureRecord>& failures) {
  std::string out;
  for (const auto& f : failures) out += ToJson(f).dump() + "\n";
  return out;
}

std::string TimingCsv(const std::vector<ScoredRecord>& records) {
  std::string out = "response_id,wall_time_ms,retries\n";
  for (const auto& r : records) {
    out += r.response_id + "," + std::to_string(r.wall_time_ms) + "," +
           std::to_string(r.retries) + "\n";
  }
  return out;
}

}  // namespace autoscore
