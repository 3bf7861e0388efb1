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

#include "autoscore/core_model.hpp"

#include <algorithm>
#include <cctype>

#include "autoscore/error.hpp"

namespace autoscore {
namespace {

bool IsBlank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

bool IsDigits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

std::string_view StripLeadingZeros(std::string_view s) {
  auto pos = s.find_first_not_of('0');
  return pos == std::string_view::npos ? s.substr(s.size() - 1) : s.substr(pos);
}

}  // namespace

ScoreRange::ScoreRange(int min, int max) : min_(min), max_(max) {
  if (min < 0 || max < 0 || max - min < 1) {
    throw Error(ErrorCode::kInvalidRange,
                std::to_string(min) + ".." + std::to_string(max) +
                    " (need 0 <= min < max)");
  }
}

std::string ScoreRange::ToString() const {
  return std::to_string(min_) + ".." + std::to_string(max_);
}

Score ValidateScore(int value, const ScoreRange& range) {
  if (!range.contains(value)) {
    throw Error(ErrorCode::kOutOfRange,
                std::to_string(value) + " outside " + range.ToString());
  }
  return Score(value);
}

void TaskContext::Validate() const {
  if (IsBlank(question)) throw Error(ErrorCode::kInvalidValue, item_id + ": empty question");
  if (IsBlank(rubric_text)) throw Error(ErrorCode::kInvalidValue, item_id + ": empty rubric");
}

void StudentResponse::Validate(const ScoreRange& range) const {
  if (IsBlank(text)) {
    throw Error(ErrorCode::kInvalidValue, "response " + response_id + " has blank text");
  }
  if (gold_score && !range.contains(*gold_score)) {
    throw Error(ErrorCode::kOutOfRange, "gold score " + std::to_string(*gold_score) +
                                            " of response " + response_id + " outside " +
                                            range.ToString());
  }
}

std::string_view ModeName(Mode mode) {
  return mode == Mode::kAutoscore ? "autoscore" : "baseline";
}

Mode ParseMode(std::string_view name) {
  if (name == "autoscore") return Mode::kAutoscore;
  if (name == "baseline") return Mode::kBaseline;
  throw Error(ErrorCode::kConfig, "unknown mode '" + std::string(name) + "'");
}

std::int64_t ScoredRecord::FirstAttemptMs() const {
  std::int64_t total = 0;
  std::string previous;
  for (const auto& t : transcripts) {
    if (t.agent_name != previous) total += t.latency_ms;
    previous = t.agent_name;
  }
  return total;
}

Json ToJson(const ScoredRecord& r) {
  Json j = Json::object();
  j["response_id"] = r.response_id;
  j["mode"] = ModeName(r.mode);
  j["gold_score"] = r.gold_score ? Json(*r.gold_score) : Json(nullptr);
  j["predicted_score"] = r.predicted_score;
  j["representation"] = r.representation ? ToJson(*r.representation) : Json(nullptr);
  Json transcripts = Json::array();
  for (const auto& t : r.transcripts) {
    transcripts.push_back({{"agent_name", t.agent_name},
                           {"prompt_digest", t.prompt_digest},
                           {"raw_output", t.raw_output},
                           {"latency_ms", t.latency_ms},
                           {"from_cache", t.from_cache}});
  }
  j["transcripts"] = std::move(transcripts);
  j["wall_time_ms"] = r.wall_time_ms;
  j["retries"] = r.retries;
  return j;
}

ScoredRecord ScoredRecordFromJson(const Json& j) {
  ScoredRecord r;
  r.response_id = j.at("response_id").get<std::string>();
  r.mode = ParseMode(j.at("mode").get<std::string>());
  if (!j.at("gold_score").is_null()) r.gold_score = j["gold_score"].get<int>();
  r.predicted_score = j.at("predicted_score").get<int>();
  if (j.contains("representation") && !j["representation"].is_null()) {
    r.representation = RepresentationFromJson(j["representation"]);
  }
  for (const auto& t : j.at("transcripts")) {
    r.transcripts.push_back(Transcript{t.at("agent_name").get<std::string>(),
                                       t.at("prompt_digest").get<std::string>(),
                                       t.at("raw_output").get<std::string>(),
                                       t.value("latency_ms", std::int64_t{0}),
                                       t.value("from_cache", false)});
  }
  r.wall_time_ms = j.at("wall_time_ms").get<std::int64_t>();
  r.retries = j.at("retries").get<int>();
  if (r.wall_time_ms < 0 || r.retries < 0) {
    throw Error(ErrorCode::kInvalidValue, "negative timing in record " + r.response_id);
  }
  if ((r.mode == Mode::kAutoscore) != r.representation.has_value()) {
    throw Error(ErrorCode::kInvalidValue,
                "record " + r.response_id + ": representation must be present exactly in "
                "autoscore mode");
  }
  return r;
}

bool ResponseIdLess(std::string_view a, std::string_view b) {
  if (IsDigits(a) && IsDigits(b)) {
    auto na = StripLeadingZeros(a);
    auto nb = StripLeadingZeros(b);
    if (na.size() != nb.size()) return na.size() < nb.size();
    if (na != nb) return na < nb;
  }
  return a < b;
}

}  // namespace autoscore
