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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "autoscore/backend.hpp"
#include "autoscore/core_model.hpp"
#include "autoscore/schema.hpp"

namespace autoscore {

/// System and user prompt text with {name} placeholders. Recognised names:
/// question, reference_material, rubric_text, response, score_min,
/// score_max, plus (extraction) schema_description, schema_skeleton and
/// (scoring) representation_json, inconsistency_notes.
struct PromptTemplate {
  std::string name;
  std::string system_text;
  std::string user_text;
};

struct PromptSet {
  PromptTemplate extraction;
  PromptTemplate scoring;
  PromptTemplate baseline;

  static PromptSet Defaults();
};

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Substitutes every {identifier} in `text` from `bindings` in a single
/// pass (substituted values are not rescanned). An identifier without a
/// binding throws kUnboundPlaceholder. Other braces are left untouched.
std::string RenderTemplate(std::string_view text, const Bindings& bindings);

struct AgentOptions {
  std::string model_name = "gpt-4o";
  double temperature = 0.0;
  int max_output_tokens = 1024;
  /// Re-prompts after the first attempt; total attempts = 1 + max_retries.
  int max_retries = 3;
};

template <typename T>
struct AgentOutcome {
  T value;
  std::vector<std::string> raw_attempts;
  int retries = 0;  // raw_attempts.size() - 1
  std::int64_t wall_time_ms = 0;
  std::vector<Transcript> transcripts;
};

inline constexpr std::string_view kExtractionAgent = "extraction";
inline constexpr std::string_view kScoringAgent = "scoring";
inline constexpr std::string_view kBaselineAgent = "baseline";

/// Reads {"score": <integer>} out of raw model output. Throws kNoJsonFound,
/// kMissingField, kNonInteger or kOutOfRange.
Score ParseScore(std::string_view raw_text, const ScoreRange& range);

/// First agent: extracts the rubric components of `response` into a
/// validated representation. Invalid output is re-prompted with the
/// validation error; after the last retry throws kExtractionFailed. Backend
/// errors propagate unchanged.
AgentOutcome<StructuredRepresentation> RunExtraction(ChatBackend& backend,
                                                     const TaskContext& context,
                                                     const StudentResponse& response,
                                                     const ComponentSchema& schema,
                                                     const PromptSet& prompts,
                                                     const AgentOptions& options);

/// Second agent: scores from the representation, the context and the
/// original response. Throws kScoringFailed once retries are exhausted.
AgentOutcome<Score> RunScoring(ChatBackend& backend, const StructuredRepresentation& representation,
                               const TaskContext& context, const StudentResponse& response,
                               const PromptSet& prompts, const AgentOptions& options);

/// Single-prompt direct scoring, the pipeline without the extraction agent.
AgentOutcome<Score> RunBaseline(ChatBackend& backend, const TaskContext& context,
                                const StudentResponse& response, const PromptSet& prompts,
                                const AgentOptions& options);

/// The messages of the first attempt of each agent; exposed so tests can
/// check prompt purity and determinism without a backend.
std::vector<ChatMessage> ExtractionMessages(const TaskContext& context,
                                            const StudentResponse& response,
                                            const ComponentSchema& schema,
                                            const PromptSet& prompts);
std::vector<ChatMessage> ScoringMessages(const StructuredRepresentation& representation,
                                         const TaskContext& context,
                                         const StudentResponse& response,
                                         const PromptSet& prompts);
std::vector<ChatMessage> BaselineMessages(const TaskContext& context,
                                          const StudentResponse& response,
                                          const PromptSet& prompts);

}  // namespace autoscore
