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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoscore/core_model.hpp"
#include "autoscore/json.hpp"
#include "autoscore/run.hpp"
#include "autoscore/schema.hpp"

namespace autoscore {

/// Human (gold) and predicted scores on one rubric scale.
class PairedScores {
 public:
  /// Throws kLengthMismatch, kEmptyInput, or kOutOfRange for values off the
  /// scale.
  PairedScores(std::vector<int> gold, std::vector<int> pred, ScoreRange range);

  const std::vector<int>& gold() const { return gold_; }
  const std::vector<int>& pred() const { return pred_; }
  const ScoreRange& range() const { return range_; }
  std::size_t size() const { return gold_.size(); }

 private:
  std::vector<int> gold_;
  std::vector<int> pred_;
  ScoreRange range_;
};

double Accuracy(const PairedScores& p);

/// Quadratic weighted kappa over the full declared range. Weights are
/// (i-j)^2/(K-1)^2 and the expected matrix is the outer product of the two
/// marginals scaled to n. When the expected disagreement is zero both
/// raters put everything in one shared category, and the result is 1.
double Qwk(const PairedScores& p);

double Mae(const PairedScores& p);
double Rmse(const PairedScores& p);

/// Undefined (nullopt) for fewer than two points or zero variance.
std::optional<double> Pearson(std::span<const double> x, std::span<const double> y);
std::optional<double> Pearson(const PairedScores& p);
/// Pearson on average ranks (ties share the mean of their positions).
std::optional<double> Spearman(std::span<const double> x, std::span<const double> y);
std::optional<double> Spearman(const PairedScores& p);

/// 1-based average ranks.
std::vector<double> AverageRanks(std::span<const double> values);

/// (K x K) counts; row = gold - min, column = pred - min.
std::vector<std::vector<int>> ConfusionMatrix(const PairedScores& p);

/// Cohen's kappa for two binary raters. When chance agreement is 1 (both
/// raters constant on the same class) the result is 1.
double CohenKappaBinary(const std::vector<bool>& gold, const std::vector<bool>& pred);

/// F1 with `true` as the positive class. 1 when neither side has any
/// positive; 0 when positives exist but none are matched.
double F1Binary(const std::vector<bool>& gold, const std::vector<bool>& pred);

struct CountAgreement {
  double mae = 0;
  double rmse = 0;
  std::optional<double> pearson;
  double exact_match_rate = 0;
};

/// Throws kEmptyInput or kLengthMismatch.
CountAgreement CountAgreementOf(const std::vector<long long>& gold,
                                const std::vector<long long>& pred);

struct MetricsReport {
  std::string label;
  ScoreRange range{0, 1};
  std::size_t n = 0;
  std::size_t failures = 0;
  double accuracy = 0;
  double qwk = 0;
  std::optional<double> pearson;
  std::optional<double> spearman;
  double mae = 0;
  double rmse = 0;
  std::vector<std::vector<int>> confusion;
};

MetricsReport ComputeMetrics(const PairedScores& p, std::string label, std::size_t failures = 0);

/// How failed responses enter the metrics: left out (kFail, n counts only
/// scored records) or scored at the bottom of the scale (kFloor).
enum class ImputationPolicy { kFail, kFloor };
ImputationPolicy ParseImputationPolicy(std::string_view name);

/// One table row for a finished run. Throws kNoGold when a record or (under
/// kFloor) a failure has no gold score, kEmptyInput when nothing was scored.
MetricsReport EvaluateRun(const RunResult& result, std::string label,
                          ImputationPolicy policy = ImputationPolicy::kFail);

Json ToJson(const MetricsReport& report);
MetricsReport MetricsReportFromJson(const Json& j);
/// Aligned two-column text plus the confusion matrix.
std::string RenderText(const MetricsReport& report);

struct BooleanFieldReliability {
  std::string field;
  double accuracy = 0;
  double f1 = 0;
  double cohen_kappa = 0;
};

struct CountFieldReliability {
  std::string field;
  double mae = 0;
  double rmse = 0;
  std::optional<double> pearson;
  double exact_match_rate = 0;
};

struct ReliabilityReport {
  std::string schema_id;
  std::size_t n = 0;
  std::vector<BooleanFieldReliability> boolean_fields;
  std::vector<CountFieldReliability> count_fields;
  /// Fraction of responses whose every count field matches gold.
  double exact_match_rate = 0;
};

/// Human component annotation of one response: boolean and count values.
struct GoldAnnotation {
  std::string response_id;
  Json values;
};

std::vector<GoldAnnotation> LoadGoldAnnotations(const std::filesystem::path& jsonl);

/// Compares extracted components against adjudicated annotations on the
/// same response ids. `predicted` is keyed by response id. Throws
/// kAlignmentError when the id sets differ and kSchemaMismatch when an
/// annotation lacks a boolean/count field or has the wrong type.
ReliabilityReport ValidateComponents(const std::map<std::string, StructuredRepresentation>& predicted,
                                     const std::vector<GoldAnnotation>& gold,
                                     const ComponentSchema& schema);

Json ToJson(const ReliabilityReport& report);
std::string RenderText(const ReliabilityReport& report);

}  // namespace autoscore
