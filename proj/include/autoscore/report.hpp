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

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autoscore/json.hpp"
#include "autoscore/metrics.hpp"
#include "autoscore/run.hpp"

namespace autoscore {

/// Relative change from `base` to `updated` in percent, measured against
/// |base| so a fall below a negative base reads as negative. Error metrics
/// keep the raw sign (a drop in MAE is negative). Throws kZeroBase.
double DeltaPercent(double base, double updated);

/// Rounds half away from zero to `decimals` places.
double RoundHalfAwayFromZero(double value, int decimals = 2);

/// "+2.28", "-7.31", "0.00".
std::string FormatDelta(double delta_percent);

enum class Metric { kQwk, kAccuracy, kPearson, kSpearman, kMae, kRmse };

inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::kQwk,      Metric::kAccuracy,
                                                      Metric::kPearson,  Metric::kSpearman,
                                                      Metric::kMae,      Metric::kRmse};

std::string_view MetricName(Metric metric);  // "qwk", "accuracy", ...
bool HigherIsBetter(Metric metric);
std::optional<double> MetricValue(const MetricsReport& report, Metric metric);

struct ComparisonRow {
  std::string dataset_label;
  std::string model_label;
  MetricsReport baseline;
  MetricsReport autoscore;

  /// Unrounded delta; nullopt when either cell is undefined or the base is 0.
  std::optional<double> Delta(Metric metric) const;
};

struct ComparisonTable {
  std::string markdown;
  Json json;
  std::vector<std::string> warnings;  // e.g. mismatched n
};

/// Baseline / autoscore / delta rows per (dataset, model), best cell of each
/// metric in bold (both on ties), undefined cells as an em dash.
ComparisonTable BuildComparisonTable(const std::vector<ComparisonRow>& rows);

struct TradeoffRow {
  std::string model;
  Mode variant = Mode::kBaseline;
  double mean_ms = 0;
  double qwk = 0;
};

struct TradeoffInput {
  RunResult run;
  MetricsReport metrics;
};

/// One row per run with at least one scored record: mean wall_time_ms per
/// scored response and the run's QWK.
std::vector<TradeoffRow> TradeoffData(const std::vector<TradeoffInput>& inputs);

/// model,variant,mean_ms,qwk
std::string TradeoffCsv(const std::vector<TradeoffRow>& rows);

/// Side-by-side audit view of one response.
struct CaseRecord {
  std::string response_id;
  std::string question_excerpt;
  std::string response_text;
  std::string rubric_excerpt;
  StructuredRepresentation components;
  std::optional<int> gold;
  int autoscore_prediction = 0;
  int baseline_prediction = 0;
};

/// Throws kNotFound when either run lacks a scored record for the id and
/// kConfig when the runs are not (autoscore, baseline).
CaseRecord BuildCaseRecord(const RunResult& autoscore_run, const RunResult& baseline_run,
                           std::string_view response_id);

std::string RenderCaseMarkdown(const CaseRecord& record);

}  // namespace autoscore
