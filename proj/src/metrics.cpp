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

#include "autoscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "autoscore/error.hpp"
#include "autoscore/io.hpp"

namespace autoscore {
namespace {

void CheckSameLength(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) throw Error(ErrorCode::kEmptyInput, "no pairs");
}

std::vector<double> ToDoubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }

Json OptionalJson(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> OptionalFromJson(const Json& j) {
  return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
}

std::string Cell(const std::optional<double>& v) {
  return v ? fmt::format("{:.4f}", *v) : std::string("undefined");
}

}  // namespace

PairedScores::PairedScores(std::vector<int> gold, std::vector<int> pred, ScoreRange range)
    : gold_(std::move(gold)), pred_(std::move(pred)), range_(range) {
  CheckSameLength(gold_.size(), pred_.size());
  for (std::size_t i = 0; i < gold_.size(); ++i) {
    if (!range_.contains(gold_[i]) || !range_.contains(pred_[i])) {
      throw Error(ErrorCode::kOutOfRange, fmt::format("pair {} ({}, {}) outside {}", i, gold_[i],
                                                      pred_[i], range_.ToString()));
    }
  }
}

double Accuracy(const PairedScores& p) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hits += p.gold()[i] == p.pred()[i];
  return static_cast<double>(hits) / static_cast<double>(p.size());
}

std::vector<std::vector<int>> ConfusionMatrix(const PairedScores& p) {
  const int k = p.range().cardinality();
  std::vector<std::vector<int>> m(k, std::vector<int>(k, 0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++m[p.gold()[i] - p.range().min()][p.pred()[i] - p.range().min()];
  }
  return m;
}

double Qwk(const PairedScores& p) {
  const int k = p.range().cardinality();
  const auto observed = ConfusionMatrix(p);
  std::vector<double> gold_hist(k, 0.0);
  std::vector<double> pred_hist(k, 0.0);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      gold_hist[i] += observed[i][j];
      pred_hist[j] += observed[i][j];
    }
  }
  const double n = static_cast<double>(p.size());
  const double scale = static_cast<double>((k - 1) * (k - 1));
  double weighted_observed = 0.0;
  double weighted_expected = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double w = static_cast<double>((i - j) * (i - j)) / scale;
      weighted_observed += w * observed[i][j];
      weighted_expected += w * gold_hist[i] * pred_hist[j] / n;
    }
  }
  if (weighted_expected == 0.0) return 1.0;
  return 1.0 - weighted_observed / weighted_expected;
}

double Mae(const PairedScores& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p.gold()[i] - p.pred()[i]);
  return sum / static_cast<double>(p.size());
}

double Rmse(const PairedScores& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = p.gold()[i] - p.pred()[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(p.size()));
}

std::optional<double> Pearson(std::span<const double> x, std::span<const double> y) {
  CheckSameLength(x.size(), y.size());
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> Pearson(const PairedScores& p) {
  auto g = ToDoubles(p.gold());
  auto q = ToDoubles(p.pred());
  return Pearson(g, q);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double rank = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> Spearman(std::span<const double> x, std::span<const double> y) {
  CheckSameLength(x.size(), y.size());
  auto rx = AverageRanks(x);
  auto ry = AverageRanks(y);
  return Pearson(rx, ry);
}

std::optional<double> Spearman(const PairedScores& p) {
  auto g = ToDoubles(p.gold());
  auto q = ToDoubles(p.pred());
  return Spearman(g, q);
}

double CohenKappaBinary(const std::vector<bool>& gold, const std::vector<bool>& pred) {
  CheckSameLength(gold.size(), pred.size());
  const double n = static_cast<double>(gold.size());
  double agree = 0.0, gold_pos = 0.0, pred_pos = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    agree += gold[i] == pred[i];
    gold_pos += gold[i];
    pred_pos += pred[i];
  }
  const double po = agree / n;
  const double pg = gold_pos / n;
  const double pp = pred_pos / n;
  const double pe = pg * pp + (1.0 - pg) * (1.0 - pp);
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

double F1Binary(const std::vector<bool>& gold, const std::vector<bool>& pred) {
  CheckSameLength(gold.size(), pred.size());
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    tp += gold[i] && pred[i];
    fp += !gold[i] && pred[i];
    fn += gold[i] && !pred[i];
  }
  if (tp + fp + fn == 0.0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

CountAgreement CountAgreementOf(const std::vector<long long>& gold,
                                const std::vector<long long>& pred) {
  CheckSameLength(gold.size(), pred.size());
  const double n = static_cast<double>(gold.size());
  CountAgreement out;
  double abs_sum = 0.0, sq_sum = 0.0, exact = 0.0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const double d = static_cast<double>(gold[i] - pred[i]);
    abs_sum += std::abs(d);
    sq_sum += d * d;
    exact += gold[i] == pred[i];
  }
  out.mae = abs_sum / n;
  out.rmse = std::sqrt(sq_sum / n);
  out.exact_match_rate = exact / n;
  std::vector<double> g(gold.begin(), gold.end());
  std::vector<double> p(pred.begin(), pred.end());
  out.pearson = Pearson(g, p);
  return out;
}

MetricsReport ComputeMetrics(const PairedScores& p, std::string label, std::size_t failures) {
  MetricsReport r;
  r.label = std::move(label);
  r.range = p.range();
  r.n = p.size();
  r.failures = failures;
  r.accuracy = Accuracy(p);
  r.qwk = Qwk(p);
  r.pearson = Pearson(p);
  r.spearman = Spearman(p);
  r.mae = Mae(p);
  r.rmse = Rmse(p);
  r.confusion = ConfusionMatrix(p);
  return r;
}

ImputationPolicy ParseImputationPolicy(std::string_view name) {
  if (name == "fail") return ImputationPolicy::kFail;
  if (name == "floor") return ImputationPolicy::kFloor;
  throw Error(ErrorCode::kConfig, "unknown imputation policy '" + std::string(name) + "'");
}

MetricsReport EvaluateRun(const RunResult& result, std::string label, ImputationPolicy policy) {
  const ScoreRange range = result.manifest.context.score_range;
  std::vector<int> gold, pred;
  for (const auto& r : result.records) {
    if (!r.gold_score) throw Error(ErrorCode::kNoGold, "record " + r.response_id);
    gold.push_back(*r.gold_score);
    pred.push_back(r.predicted_score);
  }
  if (policy == ImputationPolicy::kFloor) {
    for (const auto& f : result.failures) {
      if (!f.gold_score) throw Error(ErrorCode::kNoGold, "failure " + f.response_id);
      gold.push_back(*f.gold_score);
      pred.push_back(range.min());
    }
  }
  if (gold.empty()) throw Error(ErrorCode::kEmptyInput, "run has no scored records");
  return ComputeMetrics(PairedScores(std::move(gold), std::move(pred), range), std::move(label),
                        result.failures.size());
}

Json ToJson(const MetricsReport& r) {
  Json j = Json::object();
  j["label"] = r.label;
  j["score_range"] = {r.range.min(), r.range.max()};
  j["n"] = r.n;
  j["failures"] = r.failures;
  j["qwk"] = r.qwk;
  j["accuracy"] = r.accuracy;
  j["pearson"] = OptionalJson(r.pearson);
  j["spearman"] = OptionalJson(r.spearman);
  j["mae"] = r.mae;
  j["rmse"] = r.rmse;
  j["confusion"] = r.confusion;
  return j;
}

MetricsReport MetricsReportFromJson(const Json& j) {
  MetricsReport r;
  r.label = j.at("label").get<std::string>();
  r.range = ScoreRange(j.at("score_range").at(0).get<int>(), j.at("score_range").at(1).get<int>());
  r.n = j.at("n").get<std::size_t>();
  r.failures = j.value("failures", std::size_t{0});
  r.qwk = j.at("qwk").get<double>();
  r.accuracy = j.at("accuracy").get<double>();
  r.pearson = OptionalFromJson(j.at("pearson"));
  r.spearman = OptionalFromJson(j.at("spearman"));
  r.mae = j.at("mae").get<double>();
  r.rmse = j.at("rmse").get<double>();
  r.confusion = j.value("confusion", std::vector<std::vector<int>>{});
  return r;
}

std::string RenderText(const MetricsReport& r) {
  std::string out;
  out += fmt::format("{:<10} {}\n", "label", r.label);
  out += fmt::format("{:<10} {}\n", "range", r.range.ToString());
  out += fmt::format("{:<10} {}\n", "n", r.n);
  out += fmt::format("{:<10} {}\n", "failures", r.failures);
  out += fmt::format("{:<10} {:.4f}\n", "qwk", r.qwk);
  out += fmt::format("{:<10} {:.4f}\n", "accuracy", r.accuracy);
  out += fmt::format("{:<10} {}\n", "pearson", Cell(r.pearson));
  out += fmt::format("{:<10} {}\n", "spearman", Cell(r.spearman));
  out += fmt::format("{:<10} {:.4f}\n", "mae", r.mae);
  out += fmt::format("{:<10} {:.4f}\n", "rmse", r.rmse);
  out += "\nconfusion (rows = gold, columns = predicted)\n";
  out += fmt::format("{:>6}", "");
  for (int s = r.range.min(); s <= r.range.max(); ++s) out += fmt::format("{:>6}", s);
  out += "\n";
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    out += fmt::format("{:>6}", r.range.min() + static_cast<int>(i));
    for (int c : r.confusion[i]) out += fmt::format("{:>6}", c);
    out += "\n";
  }
  return out;
}

std::vector<GoldAnnotation> LoadGoldAnnotations(const std::filesystem::path& jsonl) {
  std::vector<GoldAnnotation> out;
  for (const auto& line : io::ReadJsonLines(jsonl)) {
    if (!line.contains("response_id") || !line.contains("values") || !line["values"].is_object()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  jsonl.string() + ": annotation lines need response_id and values{...}");
    }
    const Json& id = line["response_id"];
    out.push_back(GoldAnnotation{id.is_string() ? id.get<std::string>() : id.dump(),
                                 line["values"]});
  }
  return out;
}

ReliabilityReport ValidateComponents(
    const std::map<std::string, StructuredRepresentation>& predicted,
    const std::vector<GoldAnnotation>& gold, const ComponentSchema& schema) {
  std::map<std::string, const GoldAnnotation*> gold_by_id;
  for (const auto& g : gold) {
    if (!gold_by_id.emplace(g.response_id, &g).second) {
      throw Error(ErrorCode::kAlignmentError, "duplicate gold annotation for " + g.response_id);
    }
  }
  std::vector<std::string> missing, extra;
  for (const auto& [id, _] : gold_by_id) {
    if (!predicted.contains(id)) missing.push_back(id);
  }
  for (const auto& [id, _] : predicted) {
    if (!gold_by_id.contains(id)) extra.push_back(id);
  }
  if (!missing.empty() || !extra.empty()) {
    throw Error(ErrorCode::kAlignmentError,
                fmt::format("{} gold ids without prediction, {} predictions without gold "
                            "(first: {})",
                            missing.size(), extra.size(),
                            !missing.empty() ? missing.front() : extra.front()));
  }
  if (predicted.empty()) throw Error(ErrorCode::kEmptyInput, "no responses to compare");

  ReliabilityReport report;
  report.schema_id = schema.item_id();
  report.n = predicted.size();

  auto gold_value = [&](const std::string& id, const ComponentField& f) -> const Json& {
    const Json& values = gold_by_id.at(id)->values;
    auto it = values.find(f.name);
    if (it == values.end()) {
      throw Error(ErrorCode::kSchemaMismatch, "gold for " + id + " lacks " + f.name);
    }
    return *it;
  };
  auto predicted_value = [&](const std::string& id, const StructuredRepresentation& rep,
                             const ComponentField& f) -> const FieldValue& {
    if (rep.schema_id != schema.item_id()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "prediction for " + id + " uses schema " + rep.schema_id);
    }
    const FieldValue* v = rep.Get(f.name);
    if (v == nullptr) {
      throw Error(ErrorCode::kSchemaMismatch, "prediction for " + id + " lacks " + f.name);
    }
    return *v;
  };

  std::vector<bool> all_counts_match(predicted.size(), true);
  for (const auto& field : schema.fields()) {
    if (field.kind == FieldKind::kBoolean) {
      std::vector<bool> g, p;
      for (const auto& [id, rep] : predicted) {
        const Json& gv = gold_value(id, field);
        if (!gv.is_boolean()) {
          throw Error(ErrorCode::kSchemaMismatch, "gold " + field.name + " of " + id + " not boolean");
        }
        g.push_back(gv.get<bool>());
        p.push_back(std::get<bool>(predicted_value(id, rep, field)));
      }
      double hits = 0;
      for (std::size_t i = 0; i < g.size(); ++i) hits += g[i] == p[i];
      report.boolean_fields.push_back(BooleanFieldReliability{
          field.name, hits / static_cast<double>(g.size()), F1Binary(g, p), CohenKappaBinary(g, p)});
    } else if (field.kind == FieldKind::kCount) {
      std::vector<long long> g, p;
      for (const auto& [id, rep] : predicted) {
        const Json& gv = gold_value(id, field);
        if (!gv.is_number_integer() || gv.get<long long>() < 0) {
          throw Error(ErrorCode::kSchemaMismatch,
                      "gold " + field.name + " of " + id + " not a non-negative integer");
        }
        g.push_back(gv.get<long long>());
        p.push_back(std::get<std::int64_t>(predicted_value(id, rep, field)));
      }
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] != p[i]) all_counts_match[i] = false;
      }
      CountAgreement a = CountAgreementOf(g, p);
      report.count_fields.push_back(
          CountFieldReliability{field.name, a.mae, a.rmse, a.pearson, a.exact_match_rate});
    }
  }
  report.exact_match_rate =
      static_cast<double>(std::count(all_counts_match.begin(), all_counts_match.end(), true)) /
      static_cast<double>(all_counts_match.size());
  return report;
}

Json ToJson(const ReliabilityReport& r) {
  Json j = Json::object();
  j["schema_id"] = r.schema_id;
  j["n"] = r.n;
  Json booleans = Json::array();
  for (const auto& b : r.boolean_fields) {
    booleans.push_back(
        {{"field", b.field}, {"accuracy", b.accuracy}, {"f1", b.f1}, {"cohen_kappa", b.cohen_kappa}});
  }
  j["boolean_fields"] = std::move(booleans);
  Json counts = Json::array();
  for (const auto& c : r.count_fields) {
    counts.push_back({{"field", c.field},
                      {"mae", c.mae},
                      {"rmse", c.rmse},
                      {"pearson", OptionalJson(c.pearson)},
                      {"exact_match_rate", c.exact_match_rate}});
  }
  j["count_fields"] = std::move(counts);
  j["exact_match_rate"] = r.exact_match_rate;
  return j;
}

std::string RenderText(const ReliabilityReport& r) {
  std::string out = fmt::format("component reliability for {} (n = {})\n\n", r.schema_id, r.n);
  if (!r.boolean_fields.empty()) {
    out += fmt::format("{:<28}{:>10}{:>10}{:>10}\n", "boolean field", "accuracy", "f1", "kappa");
    for (const auto& b : r.boolean_fields) {
      out += fmt::format("{:<28}{:>10.3f}{:>10.3f}{:>10.3f}\n", b.field, b.accuracy, b.f1,
                         b.cohen_kappa);
    }
    out += "\n";
  }
  if (!r.count_fields.empty()) {
    out += fmt::format("{:<28}{:>10}{:>10}{:>10}{:>12}\n", "count field", "mae", "rmse",
                       "pearson", "exact_match");
    for (const auto& c : r.count_fields) {
      out += fmt::format("{:<28}{:>10.3f}{:>10.3f}{:>10}{:>12.3f}\n", c.field, c.mae, c.rmse,
                         c.pearson ? fmt::format("{:.3f}", *c.pearson) : "undefined",
                         c.exact_match_rate);
    }
    out += "\n";
  }
  out += fmt::format("{:<28}{:>10.3f}\n", "all counts exact match", r.exact_match_rate);
  return out;
}

}  // namespace autoscore
