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

#include "autoscore/agents.hpp"

#include <cctype>
#include <functional>
#include <limits>
#include <optional>

#include "autoscore/error.hpp"

namespace autoscore {
namespace {

constexpr std::string_view kExtractionSystem =
    "You are a rubric component extraction agent. You read a student's response to an "
    "assessment item and record, rule by rule, the evidence the scoring rubric asks for. "
    "You never assign a score.";

constexpr std::string_view kExtractionUser =
    "Assessment question:\n{question}\n\n"
    "Reference material:\n{reference_material}\n\n"
    "Scoring rubric:\n{rubric_text}\n\n"
    "Student response:\n\"\"\"\n{response}\n\"\"\"\n\n"
    "Identify the rubric-relevant components of the student response and record them in a "
    "JSON object with exactly these fields:\n{schema_description}\n"
    "Expected shape:\n{schema_skeleton}\n\n"
    "Rules:\n"
    "- Copy text spans from the student response verbatim; do not paraphrase or invent "
    "evidence.\n"
    "- Use JSON true/false for boolean fields.\n"
    "- Every count must equal the number of items in the list it counts.\n"
    "- Output only the JSON object, with no commentary and no code fences.";

constexpr std::string_view kScoringSystem =
    "You are a scoring agent. You assign the final score to a student response using the "
    "scoring rubric and the rubric components already extracted from the response.";

constexpr std::string_view kScoringUser =
    "Assessment question:\n{question}\n\n"
    "Reference material:\n{reference_material}\n\n"
    "Scoring rubric:\n{rubric_text}\n\n"
    "Student response:\n\"\"\"\n{response}\n\"\"\"\n\n"
    "Extracted rubric components:\n{representation_json}\n{inconsistency_notes}\n"
    "Assign the score the rubric gives this response. Base the judgement on the extracted "
    "components and verify them against the student response; where they disagree, correct "
    "them from the response text. Align with the rubric guidelines and resolve ambiguities in "
    "favor of the rubric definitions.\n"
    "The score must be an integer from {score_min} to {score_max}. "
    "Output exactly {\"score\": <integer>} and nothing else.";

constexpr std::string_view kBaselineSystem =
    "You are an expert rater scoring student responses with the official scoring rubric.";

constexpr std::string_view kBaselineUser =
    "Assessment question:\n{question}\n\n"
    "Reference material:\n{reference_material}\n\n"
    "Scoring rubric:\n{rubric_text}\n\n"
    "Student response:\n\"\"\"\n{response}\n\"\"\"\n\n"
    "Score the response according to the rubric. "
    "The score must be an integer from {score_min} to {score_max}. "
    "Output exactly {\"score\": <integer>} and nothing else.";

bool IsIdentStart(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

Bindings ContextBindings(const TaskContext& context, const StudentResponse& response) {
  return Bindings{
      {"question", context.question},
      {"reference_material", context.reference_material.value_or("(none)")},
      {"rubric_text", context.rubric_text},
      {"response", response.text},
      {"score_min", std::to_string(context.score_range.min())},
      {"score_max", std::to_string(context.score_range.max())},
  };
}

std::vector<ChatMessage> Render(const PromptTemplate& tmpl, const Bindings& bindings) {
  return {ChatMessage{"system", RenderTemplate(tmpl.system_text, bindings)},
          ChatMessage{"user", RenderTemplate(tmpl.user_text, bindings)}};
}

std::string RetryMessage(const std::string& previous_output, const Error& error,
                         const std::optional<ScoreRange>& range) {
  std::string msg = "Your previous reply could not be accepted (" + std::string(error.what()) +
                    ").\nPrevious reply:\n" + previous_output + "\n\n";
  if (range && error.code() == ErrorCode::kOutOfRange) {
    msg += "Reminder: the score must be an integer from " + std::to_string(range->min()) +
           " to " + std::to_string(range->max()) + ".\n";
  }
  msg += "Reply again with only the required JSON object.";
  return msg;
}

// Shared attempt loop. `parse` throws autoscore::Error for output that
// should be re-prompted; anything else (backend failures) escapes.
template <typename T>
AgentOutcome<T> RunWithRetries(ChatBackend& backend, std::string_view agent_name,
                               std::vector<ChatMessage> messages, const AgentOptions& options,
                               ErrorCode failure_code, const std::optional<ScoreRange>& range,
                               const std::function<T(const std::string&)>& parse) {
  std::vector<std::string> raw_attempts;
  std::vector<Transcript> transcripts;
  std::int64_t wall_time_ms = 0;
  std::optional<T> value;
  std::string last_error;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    ChatRequest request{options.model_name, messages, options.temperature,
                        options.max_output_tokens, /*force_json=*/true};
    std::string digest = RequestDigest(request);
    ChatResponse response = backend.Complete(request);
    wall_time_ms += response.latency_ms;
    raw_attempts.push_back(response.text);
    transcripts.push_back(Transcript{std::string(agent_name), digest, response.text,
                                     response.latency_ms, response.from_cache});
    try {
      value.emplace(parse(response.text));
      break;
    } catch (const Error& e) {
      last_error = e.what();
      messages.push_back(ChatMessage{"user", RetryMessage(response.text, e, range)});
    }
  }
  if (!value) {
    throw Error(failure_code, std::to_string(raw_attempts.size()) +
                                  " attempts, last error: " + last_error);
  }
  int retries = static_cast<int>(raw_attempts.size()) - 1;
  return AgentOutcome<T>{std::move(*value), std::move(raw_attempts), retries, wall_time_ms,
                         std::move(transcripts)};
}

}  // namespace

PromptSet PromptSet::Defaults() {
  return PromptSet{
      PromptTemplate{"extraction", std::string(kExtractionSystem), std::string(kExtractionUser)},
      PromptTemplate{"scoring", std::string(kScoringSystem), std::string(kScoringUser)},
      PromptTemplate{"baseline", std::string(kBaselineSystem), std::string(kBaselineUser)},
  };
}

std::string RenderTemplate(std::string_view text, const Bindings& bindings) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{' && i + 1 < text.size() && IsIdentStart(text[i + 1])) {
      std::size_t j = i + 1;
      while (j < text.size() && IsIdentChar(text[j])) ++j;
      if (j < text.size() && text[j] == '}') {
        std::string_view name = text.substr(i + 1, j - i - 1);
        auto it = bindings.find(name);
        if (it == bindings.end()) {
          throw Error(ErrorCode::kUnboundPlaceholder, "{" + std::string(name) + "}");
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += text[i++];
  }
  return out;
}

Score ParseScore(std::string_view raw_text, const ScoreRange& range) {
  Json parsed = Json::parse(ExtractJsonBlock(raw_text));
  auto it = parsed.find("score");
  if (it == parsed.end()) throw Error(ErrorCode::kMissingField, "score");
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::kNonInteger, "score must be an integer, got " + it->dump());
  }
  if (it->is_number_unsigned()) {
    auto v = it->get<std::uint64_t>();
    if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      throw Error(ErrorCode::kOutOfRange, it->dump() + " outside " + range.ToString());
    }
    return ValidateScore(static_cast<int>(v), range);
  }
  auto v = it->get<std::int64_t>();
  if (v < std::numeric_limits<int>::min()) {
    throw Error(ErrorCode::kOutOfRange, it->dump() + " outside " + range.ToString());
  }
  return ValidateScore(static_cast<int>(v), range);
}

std::vector<ChatMessage> ExtractionMessages(const TaskContext& context,
                                            const StudentResponse& response,
                                            const ComponentSchema& schema,
                                            const PromptSet& prompts) {
  Bindings b = ContextBindings(context, response);
  b["schema_description"] = schema.Describe();
  b["schema_skeleton"] = schema.Skeleton();
  return Render(prompts.extraction, b);
}

std::vector<ChatMessage> ScoringMessages(const StructuredRepresentation& representation,
                                         const TaskContext& context,
                                         const StudentResponse& response,
                                         const PromptSet& prompts) {
  Bindings b = ContextBindings(context, response);
  b["representation_json"] = ValuesToJson(representation).dump(2);
  std::string notes;
  if (!representation.inconsistency_flags.empty()) {
    notes = "Note: the stated values of these counts disagreed with their lists and were "
            "recomputed from the list lengths:";
    for (const auto& f : representation.inconsistency_flags) notes += " " + f;
    notes += "\n";
  }
  b["inconsistency_notes"] = notes;
  return Render(prompts.scoring, b);
}

std::vector<ChatMessage> BaselineMessages(const TaskContext& context,
                                          const StudentResponse& response,
                                          const PromptSet& prompts) {
  return Render(prompts.baseline, ContextBindings(context, response));
}

AgentOutcome<StructuredRepresentation> RunExtraction(ChatBackend& backend,
                                                     const TaskContext& context,
                                                     const StudentResponse& response,
                                                     const ComponentSchema& schema,
                                                     const PromptSet& prompts,
                                                     const AgentOptions& options) {
  std::function<StructuredRepresentation(const std::string&)> parse =
      [&schema](const std::string& raw) {
        return ValidateRepresentation(ExtractJsonBlock(raw), schema);
      };
  return RunWithRetries(backend, kExtractionAgent,
                        ExtractionMessages(context, response, schema, prompts), options,
                        ErrorCode::kExtractionFailed, std::nullopt, parse);
}

AgentOutcome<Score> RunScoring(ChatBackend& backend, const StructuredRepresentation& representation,
                               const TaskContext& context, const StudentResponse& response,
                               const PromptSet& prompts, const AgentOptions& options) {
  const ScoreRange range = context.score_range;
  std::function<Score(const std::string&)> parse = [range](const std::string& raw) {
    return ParseScore(raw, range);
  };
  return RunWithRetries(backend, kScoringAgent,
                        ScoringMessages(representation, context, response, prompts), options,
                        ErrorCode::kScoringFailed, range, parse);
}

AgentOutcome<Score> RunBaseline(ChatBackend& backend, const TaskContext& context,
                                const StudentResponse& response, const PromptSet& prompts,
                                const AgentOptions& options) {
  const ScoreRange range = context.score_range;
  std::function<Score(const std::string&)> parse = [range](const std::string& raw) {
    return ParseScore(raw, range);
  };
  return RunWithRetries(backend, kBaselineAgent, BaselineMessages(context, response, prompts),
                        options, ErrorCode::kScoringFailed, range, parse);
}

}  // namespace autoscore
