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

#include <gtest/gtest.h>

#include "autoscore/error.hpp"
#include "autoscore/io.hpp"
#include "autoscore/pipeline.hpp"
#include "test_util.hpp"

namespace autoscore {
namespace {

using testing::DataPath;
using testing::DemoConfig;
using testing::TempDir;

MetricsReport Report(double qwk, double accuracy, std::optional<double> pearson,
                     std::optional<double> spearman, double mae, double rmse, std::size_t n = 10) {
  MetricsReport r;
  r.label = "x";
  r.range = ScoreRange(0, 3);
  r.n = n;
  r.qwk = qwk;
  r.accuracy = accuracy;
  r.pearson = pearson;
  r.spearman = spearman;
  r.mae = mae;
  r.rmse = rmse;
  return r;
}

TEST(DeltaPercentTest, Examples) {
  EXPECT_EQ(FormatDelta(DeltaPercent(0.701, 0.717)), "+2.28");
  EXPECT_EQ(FormatDelta(DeltaPercent(0.150, 0.261)), "+74.00");
  // -7.317...: the published -7.31 lies within the 0.02 tolerance but the
  // rounded form is -7.32.
  EXPECT_EQ(FormatDelta(DeltaPercent(0.451, 0.418)), "-7.32");
  EXPECT_NEAR(DeltaPercent(0.451, 0.418), -7.31, 0.02);
  EXPECT_EQ(FormatDelta(DeltaPercent(0.6, 0.6)), "0.00");
  EXPECT_EQ(DeltaPercent(0.6, 0.6), 0.0);
  try {
    DeltaPercent(0.0, 0.3);
    FAIL() << "expected ZeroBase";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroBase);
  }
}

TEST(DeltaPercentTest, NegativeBaseUsesMagnitude) {
  // A correlation falling from -0.230 to -0.255 is a decline.
  EXPECT_EQ(FormatDelta(DeltaPercent(-0.230, -0.255)), "-10.87");
  EXPECT_GT(DeltaPercent(-0.5, -0.25), 0.0);
}

TEST(DeltaPercentTest, MonotoneInNewValue) {
  for (double base : {0.05, 0.3, 1.7}) {
    double previous = DeltaPercent(base, -2.0);
    for (double b = -1.99; b < 2.0; b += 0.01) {
      double d = DeltaPercent(base, b);
      EXPECT_GT(d, previous);
      previous = d;
    }
  }
}

TEST(RoundingTest, HalfAwayFromZero) {
  EXPECT_EQ(RoundHalfAwayFromZero(0.125, 2), 0.13);
  EXPECT_EQ(RoundHalfAwayFromZero(-0.125, 2), -0.13);
  EXPECT_EQ(RoundHalfAwayFromZero(2.285, 2), 2.29);
  EXPECT_EQ(RoundHalfAwayFromZero(-2.285, 2), -2.29);
  EXPECT_EQ(RoundHalfAwayFromZero(1.004, 2), 1.0);
  EXPECT_EQ(FormatDelta(-0.001), "0.00");
}

TEST(ComparisonTableTest, PublishedDeltas) {
  Json fixture = Json::parse(io::ReadFile(DataPath("published_comparison.json")));
  std::vector<ComparisonRow> rows;
  for (const auto& r : fixture["rows"]) {
    auto report = [](const Json& m) {
      return Report(m["qwk"], m["accuracy"], m["pearson"].get<double>(),
                    m["spearman"].get<double>(), m["mae"], m["rmse"]);
    };
    rows.push_back(ComparisonRow{r["dataset"], r["model"], report(r["baseline"]),
                                 report(r["autoscore"])});
  }
  ComparisonTable table = BuildComparisonTable(rows);
  ASSERT_EQ(table.json["rows"].size(), 12u);
  std::vector<std::string> mismatches;
  int checked = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Metric m : kAllMetrics) {
      const std::string name(MetricName(m));
      const double printed = std::stod(fixture["rows"][i]["delta_percent"][name].get<std::string>());
      const double computed = table.json["rows"][i]["delta_percent"][name].get<double>();
      ++checked;
      if (std::abs(computed - printed) > 0.02) {
        mismatches.push_back(rows[i].dataset_label + "/" + rows[i].model_label + "/" + name);
      }
    }
  }
  EXPECT_EQ(checked, 72);
  // The printed +10.39 cannot be produced from the printed 0.517 and 0.570
  // (the ratio gives +10.25); every other entry reproduces.
  EXPECT_EQ(mismatches, std::vector<std::string>{"biology/LLaMA-3.1-70B-Instruct/spearman"});
  EXPECT_NE(table.markdown.find("| +74.00% |"), std::string::npos);
}

TEST(ComparisonTableTest, EqualReportsTieOnBothCells) {
  MetricsReport r = Report(0.5, 0.6, 0.7, 0.65, 0.4, 0.6);
  ComparisonTable table = BuildComparisonTable({ComparisonRow{"science", "m", r, r}});
  const Json& row = table.json["rows"][0];
  for (Metric m : kAllMetrics) {
    const std::string name(MetricName(m));
    EXPECT_EQ(row["delta_percent"][name], 0.0);
    EXPECT_EQ(row["best"][name], "tie");
  }
  EXPECT_NE(table.markdown.find("| science | m | **0.500** | **0.600** |"), std::string::npos);
  EXPECT_NE(table.markdown.find("| | + autoscore | **0.500** | **0.600** |"), std::string::npos);
  EXPECT_NE(table.markdown.find("| | Δ (%) | 0.00% |"), std::string::npos);
  EXPECT_TRUE(table.warnings.empty());
}

TEST(ComparisonTableTest, DirectionOfBetter) {
  MetricsReport base = Report(0.5, 0.6, 0.7, 0.6, 0.40, 0.60);
  MetricsReport mine = Report(0.6, 0.5, 0.7, 0.6, 0.30, 0.70);
  ComparisonTable table = BuildComparisonTable({ComparisonRow{"d", "m", base, mine}});
  const Json& best = table.json["rows"][0]["best"];
  EXPECT_EQ(best["qwk"], "autoscore");
  EXPECT_EQ(best["accuracy"], "baseline");
  EXPECT_EQ(best["mae"], "autoscore");
  EXPECT_EQ(best["rmse"], "baseline");
}

TEST(ComparisonTableTest, NullCellsRenderAsDash) {
  MetricsReport base = Report(0.5, 0.6, 0.7, std::nullopt, 0.4, 0.6);
  MetricsReport mine = Report(0.6, 0.6, 0.7, 0.6, 0.4, 0.6);
  ComparisonTable table = BuildComparisonTable({ComparisonRow{"d", "m", base, mine}});
  const Json& row = table.json["rows"][0];
  EXPECT_TRUE(row["delta_percent"]["spearman"].is_null());
  EXPECT_TRUE(row["baseline"]["spearman"].is_null());
  EXPECT_TRUE(row["best"]["spearman"].is_null());
  EXPECT_NE(table.markdown.find("| **0.700** | — | **0.400** |"), std::string::npos);
  EXPECT_NE(table.markdown.find("| 0.00% | — | 0.00% |"), std::string::npos);
}

TEST(ComparisonTableTest, WarnsOnMismatchedNAndIsDeterministic) {
  MetricsReport base = Report(0.5, 0.6, 0.7, 0.6, 0.4, 0.6, 100);
  MetricsReport mine = Report(0.6, 0.6, 0.7, 0.6, 0.4, 0.6, 97);
  std::vector<ComparisonRow> rows{ComparisonRow{"d", "m", base, mine}};
  ComparisonTable first = BuildComparisonTable(rows);
  ComparisonTable second = BuildComparisonTable(rows);
  ASSERT_EQ(first.warnings.size(), 1u);
  EXPECT_NE(first.warnings[0].find("MismatchedN"), std::string::npos);
  EXPECT_EQ(first.markdown, second.markdown);
  EXPECT_EQ(first.json.dump(), second.json.dump());
}

RunResult TimedRun(Mode mode, std::string model, std::vector<std::int64_t> times) {
  RunResult run;
  run.manifest.mode = mode;
  run.manifest.model_name = std::move(model);
  for (std::size_t i = 0; i < times.size(); ++i) {
    ScoredRecord r;
    r.response_id = std::to_string(i);
    r.mode = mode;
    r.wall_time_ms = times[i];
    if (mode == Mode::kAutoscore) r.representation = StructuredRepresentation{"x", {}, {}};
    run.records.push_back(r);
  }
  return run;
}

TEST(TradeoffTest, MeansAndCsv) {
  MetricsReport metrics = Report(0.5, 0.6, 0.7, 0.6, 0.4, 0.6);
  std::vector<TradeoffInput> inputs{
      {TimedRun(Mode::kBaseline, "m", {100, 100, 100}), metrics},
      {TimedRun(Mode::kAutoscore, "m", {250, 250}), metrics},
      {TimedRun(Mode::kBaseline, "empty", {}), metrics},
  };
  auto rows = TradeoffData(inputs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mean_ms, 100.0);
  EXPECT_EQ(rows[1].mean_ms, 250.0);
  EXPECT_EQ(TradeoffCsv(rows),
            "model,variant,mean_ms,qwk\nm,baseline,100,0.5\nm,autoscore,250,0.5\n");
  EXPECT_EQ(TradeoffCsv({}), "model,variant,mean_ms,qwk\n");
}

TEST(TradeoffTest, AutoscoreCostsAtLeastBaselineOnEqualCallLatency) {
  Config config = DemoConfig();
  const ItemConfig& item = config.Item("demo");
  Dataset dataset = LoadDataset(item.dataset, item.binding.context.score_range);
  // Every call costs 30 ms and answers with a valid object for either agent.
  ScriptedBackend backend([](const ChatRequest& request) {
    const bool extraction =
        request.messages[0].content.find("extraction") != std::string::npos;
    return ScriptedReply{extraction ? R"({"claim_present": true, "evidence_items": [],
                                         "evidence_count": 0, "causal_explanation": ""})"
                                    : R"({"score": 1})",
                         30};
  });
  TempDir tmp;
  std::vector<TradeoffInput> inputs;
  for (Mode mode : {Mode::kBaseline, Mode::kAutoscore}) {
    RunConfig run;
    run.mode = mode;
    run.agent = config.run.agent;
    run.run_dir = tmp / std::string(ModeName(mode));
    RunResult result = ScoreDataset(run, dataset, item.binding, backend);
    inputs.push_back({result, Report(0.5, 0.6, 0.7, 0.6, 0.4, 0.6)});
  }
  auto rows = TradeoffData(inputs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mean_ms, 30.0);
  EXPECT_EQ(rows[1].mean_ms, 60.0);
  EXPECT_GE(rows[1].mean_ms, rows[0].mean_ms);
}

struct CaseFixture {
  RunResult autoscore_run;
  RunResult baseline_run;

  CaseFixture() {
    TaskContext ctx;
    ctx.item_id = "english";
    ctx.question = "How does the author organize the article? Support your response with "
                   "details from the article.";
    ctx.rubric_text = "1 pt (Partially Proficient): Fulfills some requirements, but may be "
                      "general or simplistic.\n0 pt (Not Proficient): Inaccurate, incomplete, or "
                      "missing information.";
    ctx.score_range = ScoreRange(0, 3);
    autoscore_run.manifest.mode = Mode::kAutoscore;
    autoscore_run.manifest.context = ctx;
    baseline_run.manifest.mode = Mode::kBaseline;
    baseline_run.manifest.context = ctx;

    const std::string text =
        "The author organizes the article in parts. He starts with an introduction to pull the "
        "reader in and then quickly changes the tone to show that he is still taking the article "
        "seriously.";
    autoscore_run.response_texts["17"] = text;

    ScoredRecord a;
    a.response_id = "17";
    a.mode = Mode::kAutoscore;
    a.gold_score = 1;
    a.predicted_score = 1;
    a.representation = StructuredRepresentation{
        "english",
        {{"organization_method", std::string("The author organizes the article in parts.")},
         {"supporting_details",
          std::vector<std::string>{"He starts with an introduction to pull the reader in.",
                                   "Then quickly changes the tone to show seriousness."}},
         {"detail_count", std::int64_t{2}}},
        {}};
    autoscore_run.records.push_back(a);

    ScoredRecord b;
    b.response_id = "17";
    b.mode = Mode::kBaseline;
    b.gold_score = 1;
    b.predicted_score = 0;
    baseline_run.records.push_back(b);
  }
};

TEST(CaseRecordTest, AssemblesAuditView) {
  CaseFixture fx;
  CaseRecord c = BuildCaseRecord(fx.autoscore_run, fx.baseline_run, "17");
  EXPECT_EQ(c.gold, 1);
  EXPECT_EQ(c.autoscore_prediction, 1);
  EXPECT_EQ(c.baseline_prediction, 0);
  EXPECT_EQ(c.response_text.substr(0, 19), "The author organize");

  const std::string md = RenderCaseMarkdown(c);
  EXPECT_NE(md.find("*Human Score = 1*, *autoscore = 1*, *Baseline = 0*"), std::string::npos);
  EXPECT_NE(md.find("**Assessment Question:** How does the author organize"), std::string::npos);
  EXPECT_NE(md.find("**Rubric Excerpt:**"), std::string::npos);
  EXPECT_NE(md.find("- **organization_method:** The author organizes the article in parts."),
            std::string::npos);
  EXPECT_NE(md.find("- **supporting_details:** \n  - He starts with an introduction"),
            std::string::npos);
  EXPECT_NE(md.find("\n  - Then quickly changes the tone"), std::string::npos);
  // Pretty-printed Z.
  EXPECT_NE(md.find("```json\n{\n  \"organization_method\": "), std::string::npos);
  EXPECT_EQ(md, RenderCaseMarkdown(BuildCaseRecord(fx.autoscore_run, fx.baseline_run, "17")));
}

TEST(CaseRecordTest, Errors) {
  CaseFixture fx;
  auto code_of = [&](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kConfig;
  };
  RunResult empty_baseline = fx.baseline_run;
  empty_baseline.records.clear();
  EXPECT_EQ(code_of([&] { BuildCaseRecord(fx.autoscore_run, empty_baseline, "17"); }),
            ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { BuildCaseRecord(fx.autoscore_run, fx.baseline_run, "18"); }),
            ErrorCode::kNotFound);
  bool threw_config = false;
  try {
    BuildCaseRecord(fx.baseline_run, fx.autoscore_run, "17");
  } catch (const Error& e) {
    threw_config = e.code() == ErrorCode::kConfig;
  }
  EXPECT_TRUE(threw_config);
}

TEST(CaseRecordTest, LongContextIsExcerpted) {
  CaseFixture fx;
  std::string rubric;
  for (int i = 0; i < 200; ++i) rubric += "criterion ";
  fx.autoscore_run.manifest.context.rubric_text = rubric;
  CaseRecord c = BuildCaseRecord(fx.autoscore_run, fx.baseline_run, "17");
  EXPECT_LE(c.rubric_excerpt.size(), 610u);
  EXPECT_EQ(c.rubric_excerpt.substr(c.rubric_excerpt.size() - 4), " ...");
}

}  // namespace
}  // namespace autoscore
