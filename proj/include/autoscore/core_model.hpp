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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoscore/json.hpp"
#include "autoscore/schema.hpp"

namespace autoscore {

/// Inclusive integer score scale of one rubric, e.g. 0..3.
class ScoreRange {
 public:
  /// Throws kInvalidRange unless 0 <= min < max.
  ScoreRange(int min, int max);

  int min() const { return min_; }
  int max() const { return max_; }
  /// Number of score points (K).
  int cardinality() const { return max_ - min_ + 1; }
  bool contains(int value) const { return value >= min_ && value <= max_; }
  std::string ToString() const;

  friend bool operator==(const ScoreRange&, const ScoreRange&) = default;

 private:
  int min_;
  int max_;
};

/// A score point known to lie inside the range it was validated against.
class Score {
 public:
  int value() const { return value_; }
  friend auto operator<=>(const Score&, const Score&) = default;

 private:
  friend Score ValidateScore(int value, const ScoreRange& range);
  explicit Score(int value) : value_(value) {}
  int value_;
};

/// Throws kOutOfRange when `value` is not a legal point of `range`.
Score ValidateScore(int value, const ScoreRange& range);

/// Everything the raters see besides the response itself.
struct TaskContext {
  std::string item_id;
  std::string question;
  std::optional<std::string> reference_material;
  std::string rubric_text;
  ScoreRange score_range{0, 1};

  /// Throws kInvalidValue when question or rubric text is empty.
  void Validate() const;
};

struct StudentResponse {
  std::string response_id;
  std::string item_id;
  std::string text;
  std::optional<int> gold_score;

  /// Throws kInvalidValue on blank text, kOutOfRange on an illegal gold score.
  void Validate(const ScoreRange& range) const;
};

enum class Mode { kAutoscore, kBaseline };

std::string_view ModeName(Mode mode);
/// Throws kConfig for anything other than "autoscore" / "baseline".
Mode ParseMode(std::string_view name);

/// One backend exchange made while scoring a response.
struct Transcript {
  std::string agent_name;
  std::string prompt_digest;
  std::string raw_output;
  std::int64_t latency_ms = 0;
  bool from_cache = false;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

struct ScoredRecord {
  std::string response_id;
  Mode mode = Mode::kAutoscore;
  /// Absent for unlabeled responses; serialized as null.
  std::optional<int> gold_score;
  int predicted_score = 0;
  std::optional<StructuredRepresentation> representation;
  std::vector<Transcript> transcripts;
  /// Sum of backend latency over every attempt, retries included.
  std::int64_t wall_time_ms = 0;
  int retries = 0;

  /// Latency of the first call of each agent, i.e. the cost had no retry
  /// been needed.
  std::int64_t FirstAttemptMs() const;

  friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

Json ToJson(const ScoredRecord& record);
/// Throws kInvalidValue when mode and representation disagree.
ScoredRecord ScoredRecordFromJson(const Json& j);

/// Orders response ids numerically when both are plain integers and
/// lexicographically otherwise, so "2" sorts before "10".
bool ResponseIdLess(std::string_view a, std::string_view b);

}  // namespace autoscore
