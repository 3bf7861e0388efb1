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

#include "autoscore/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "autoscore/error.hpp"

namespace autoscore {
namespace {

constexpr std::size_t kExcerptChars = 600;
constexpr std::string_view kUndefinedCell = "—";

std::string Excerpt(const std::string& text) {
  if (text.size() <= kExcerptChars) return text;
  std::size_t cut = text.rfind(' ', kExcerptChars);
  if (cut == std::string::npos || cut < kExcerptChars / 2) cut = kExcerptChars;
  // Never split a UTF-8 sequence.
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return text.substr(0, cut) + " ...";
}

std::string Cell(const std::optional<double>& v, bool best) {
  if (!v) return std::string(kUndefinedCell);
  std::string s = fmt::format("{:.3f}", *v);
  return best ? "**" + s + "**" : s;
}

const ScoredRecord* FindRecord(const RunResult& run, std::string_view id) {
  for (const auto& r : run.records) {
    if (r.response_id == id) return &r;
  }
  return nullptr;
}

void AppendValue(std::string& out, const FieldValue& value, const std::string& indent) {
  if (const auto* b = std::get_if<bool>(&value)) {
    out += *b ? "true" : "false";
  } else if (const auto* list = std::get_if<std::vector<std::string>>(&value)) {
    if (list->empty()) out += "(none)";
    for (std::size_t i = 0; i < list->size(); ++i) {
      out += "\n" + indent + "  - " + (*list)[i];
    }
  } else if (const auto* n = std::get_if<std::int64_t>(&value)) {
    out += std::to_string(*n);
  } else {
    out += std::get<std::string>(value);
  }
}

}  // namespace

double DeltaPercent(double base, double updated) {
  if (base == 0.0) throw Error(ErrorCode::kZeroBase, "relative change from 0 is undefined");
  return 100.0 * (updated - base) / std::abs(base);
}

double RoundHalfAwayFromZero(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The nudge keeps values such as 2.285 (stored as 2.28499...) rounding as
  // printed decimals would.
  const double scaled = value * scale;
  return std::round(scaled + std::copysign(1e-9, scaled)) / scale;
}

std::string FormatDelta(double delta_percent) {
  double rounded = RoundHalfAwayFromZero(delta_percent, 2);
  if (rounded == 0.0) return "0.00";
  return fmt::format("{:+.2f}", rounded);
}

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kQwk: return "qwk";
    case Metric::kAccuracy: return "accuracy";
    case Metric::kPearson: return "pearson";
    case Metric::kSpearman: return "spearman";
    case Metric::kMae: return "mae";
    case Metric::kRmse: return "rmse";
  }
  return "";
}

bool HigherIsBetter(Metric metric) { return metric != Metric::kMae && metric != Metric::kRmse; }

std::optional<double> MetricValue(const MetricsReport& r, Metric metric) {
  switch (metric) {
    case Metric::kQwk: return r.qwk;
    case Metric::kAccuracy: return r.accuracy;
    case Metric::kPearson: return r.pearson;
    case Metric::kSpearman: return r.spearman;
    case Metric::kMae: return r.mae;
    case Metric::kRmse: return r.rmse;
  }
  return std::nullopt;
}

std::optional<double> ComparisonRow::Delta(Metric metric) const {
  auto base = MetricValue(baseline, metric);
  auto updated = MetricValue(autoscore, metric);
  if (!base || !updated || *base == 0.0) return std::nullopt;
  return DeltaPercent(*base, *updated);
}

ComparisonTable BuildComparisonTable(const std::vector<ComparisonRow>& rows) {
  ComparisonTable table;
  std::string& md = table.markdown;
  md += "| Dataset | Model | QWK ↑ | Accuracy ↑ | Pearson ↑ | Spearman ↑ | "
        "MAE ↓ | RMSE ↓ |\n";
  md += "|---|---|---:|---:|---:|---:|---:|---:|\n";

  Json json_rows = Json::array();
  for (const auto& row : rows) {
    if (row.baseline.n != row.autoscore.n) {
      table.warnings.push_back(fmt::format(
          "MismatchedN: {} / {}: baseline n = {}, autoscore n = {} (failures differ)",
          row.dataset_label, row.model_label, row.baseline.n, row.autoscore.n));
    }
    std::string base_line = "| " + row.dataset_label + " | " + row.model_label + " |";
    std::string auto_line = "| | + autoscore |";
    std::string delta_line = "| | Δ (%) |";
    Json baseline_json = Json::object();
    Json autoscore_json = Json::object();
    Json delta_json = Json::object();
    Json best_json = Json::object();
    for (Metric m : kAllMetrics) {
      const auto name = std::string(MetricName(m));
      auto b = MetricValue(row.baseline, m);
      auto a = MetricValue(row.autoscore, m);
      bool b_best = false, a_best = false;
      if (a && b) {
        bool a_wins = HigherIsBetter(m) ? *a > *b : *a < *b;
        bool b_wins = HigherIsBetter(m) ? *b > *a : *b < *a;
        a_best = a_wins || *a == *b;
        b_best = b_wins || *a == *b;
        best_json[name] = *a == *b ? "tie" : (a_wins ? "autoscore" : "baseline");
      } else {
        best_json[name] = nullptr;
      }
      base_line += " " + Cell(b, b_best) + " |";
      auto_line += " " + Cell(a, a_best) + " |";
      auto delta = row.Delta(m);
      delta_line += " " + (delta ? FormatDelta(*delta) + "%" : std::string(kUndefinedCell)) + " |";
      baseline_json[name] = b ? Json(*b) : Json(nullptr);
      autoscore_json[name] = a ? Json(*a) : Json(nullptr);
      delta_json[name] = delta ? Json(RoundHalfAwayFromZero(*delta, 2)) : Json(nullptr);
    }
    md += base_line + "\n" + auto_line + "\n" + delta_line + "\n";
    json_rows.push_back({{"dataset", row.dataset_label},
                         {"model", row.model_label},
                         {"baseline_n", row.baseline.n},
                         {"autoscore_n", row.autoscore.n},
                         {"baseline", std::move(baseline_json)},
                         {"autoscore", std::move(autoscore_json)},
                         {"delta_percent", std::move(delta_json)},
                         {"best", std::move(best_json)}});
  }
  table.json = Json::object();
  table.json["rows"] = std::move(json_rows);
  table.json["warnings"] = table.warnings;
  return table;
}

std::vector<TradeoffRow> TradeoffData(const std::vector<TradeoffInput>& inputs) {
  std::vector<TradeoffRow> rows;
  for (const auto& in : inputs) {
    if (in.run.records.empty()) continue;
    double total = 0.0;
    for (const auto& r : in.run.records) total += static_cast<double>(r.wall_time_ms);
    rows.push_back(TradeoffRow{in.run.manifest.model_name, in.run.manifest.mode,
                               total / static_cast<double>(in.run.records.size()),
                               in.metrics.qwk});
  }
  return rows;
}

std::string TradeoffCsv(const std::vector<TradeoffRow>& rows) {
  std::string out = "model,variant,mean_ms,qwk\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", r.model, ModeName(r.variant), r.mean_ms, r.qwk);
  }
  return out;
}

CaseRecord BuildCaseRecord(const RunResult& autoscore_run, const RunResult& baseline_run,
                           std::string_view response_id) {
  if (autoscore_run.manifest.mode != Mode::kAutoscore ||
      baseline_run.manifest.mode != Mode::kBaseline) {
    throw Error(ErrorCode::kConfig, "case records need an autoscore run and a baseline run");
  }
  const ScoredRecord* a = FindRecord(autoscore_run, response_id);
  const ScoredRecord* b = FindRecord(baseline_run, response_id);
  if (a == nullptr || b == nullptr) {
    throw Error(ErrorCode::kNotFound,
                std::string(response_id) + " not scored in the " +
                    (a == nullptr ? "autoscore" : "baseline") + " run");
  }
  const TaskContext& ctx = autoscore_run.manifest.context;
  CaseRecord c;
  c.response_id = a->response_id;
  c.question_excerpt = Excerpt(ctx.question);
  c.rubric_excerpt = Excerpt(ctx.rubric_text);
  auto text = autoscore_run.response_texts.find(response_id);
  if (text == autoscore_run.response_texts.end()) {
    throw Error(ErrorCode::kNotFound, "no text for " + std::string(response_id) + " in " +
                                          std::string(kResponsesFile));
  }
  c.response_text = text->second;
  c.components = *a->representation;
  c.gold = a->gold_score;
  c.autoscore_prediction = a->predicted_score;
  c.baseline_prediction = b->predicted_score;
  return c;
}

std::string RenderCaseMarkdown(const CaseRecord& c) {
  std::string out = "# Case " + c.response_id + "\n\n";
  out += fmt::format("*Human Score = {}*, *autoscore = {}*, *Baseline = {}*\n\n",
                     c.gold ? std::to_string(*c.gold) : std::string("n/a"),
                     c.autoscore_prediction, c.baseline_prediction);
  out += "**Assessment Question:** " + c.question_excerpt + "\n\n";
  out += "**Student Response:** " + c.response_text + "\n\n";
  out += "**Rubric Excerpt:**\n\n" + c.rubric_excerpt + "\n\n";
  out += "**Extracted Components:**\n\n";
  for (const auto& [name, value] : c.components.values) {
    out += "- **" + name + ":** ";
    AppendValue(out, value, "");
    out += "\n";
  }
  if (!c.components.inconsistency_flags.empty()) {
    out += "\nCounts corrected from their lists:";
    for (const auto& f : c.components.inconsistency_flags) out += " " + f;
    out += "\n";
  }
  out += "\n```json\n" + ValuesToJson(c.components).dump(2) + "\n```\n";
  return out;
}

}  // namespace autoscore
