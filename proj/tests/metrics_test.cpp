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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "autoscore/error.hpp"
#include "autoscore/io.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace autoscore {
namespace {

using testing::DataPath;

PairedScores P(std::vector<int> g, std::vector<int> p, int min = 0, int max = 3) {
  return PairedScores(std::move(g), std::move(p), ScoreRange(min, max));
}

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no autoscore::Error thrown";
  return ErrorCode::kConfig;
}

TEST(PairedScoresTest, RejectsBadInput) {
  EXPECT_EQ(CodeOf([] { P({0, 1}, {0}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([] { P({}, {}); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(CodeOf([] { P({0, 4}, {0, 1}); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(CodeOf([] { P({0, 1}, {0, -1}); }), ErrorCode::kOutOfRange);
}

TEST(AccuracyTest, Examples) {
  EXPECT_DOUBLE_EQ(Accuracy(P({0, 1, 2, 3}, {0, 1, 2, 3})), 1.0);
  EXPECT_DOUBLE_EQ(Accuracy(P({0, 1}, {1, 0})), 0.0);
  EXPECT_DOUBLE_EQ(Accuracy(P({0, 0, 1, 2}, {0, 1, 1, 3})), 0.5);
}

TEST(QwkTest, Examples) {
  EXPECT_DOUBLE_EQ(Qwk(P({0, 2, 3, 1}, {0, 2, 3, 1})), 1.0);
  EXPECT_DOUBLE_EQ(Qwk(P({0, 0, 0}, {0, 0, 0})), 1.0);
  // Direct O, E, w summation over the 4x4 table.
  const std::vector<int> g{0, 0, 1, 2}, p{0, 1, 1, 3};
  double num = 0, den = 0;
  const double gh[4] = {2, 1, 1, 0}, ph[4] = {1, 2, 0, 1};
  const double o[4][4] = {{1, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double w = (i - j) * (i - j) / 9.0;
      num += w * o[i][j];
      den += w * gh[i] * ph[j] / 4.0;
    }
  }
  EXPECT_NEAR(Qwk(P(g, p)), 1.0 - num / den, 1e-15);
  EXPECT_NEAR(Qwk(P(g, p)), oracle::Qwk(g, p), 1e-15);
}

TEST(QwkTest, UsesFullDeclaredRange) {
  // Unobserved categories add nothing to either sum and the weight scale
  // cancels, so widening the range leaves kappa unchanged. The confusion
  // matrix still spans the declared range.
  EXPECT_NEAR(Qwk(P({1, 2, 2}, {1, 1, 2}, 1, 2)), Qwk(P({1, 2, 2}, {1, 1, 2}, 0, 5)), 1e-15);
  EXPECT_EQ(ConfusionMatrix(P({1, 2}, {1, 1}, 0, 5)).size(), 6u);
}

TEST(QwkTest, PerfectReversalIsNegative) {
  std::vector<int> g{0, 1, 2, 3}, p{3, 2, 1, 0};
  EXPECT_LT(Qwk(P(g, p)), 0.0);
  EXPECT_NEAR(Qwk(P(g, p)), oracle::Qwk(g, p), 1e-15);
}

TEST(ErrorMetricsTest, Examples) {
  EXPECT_DOUBLE_EQ(Mae(P({1, 2}, {1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(Rmse(P({1, 2}, {1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(Mae(P({0, 2}, {1, 0})), 1.5);
  EXPECT_NEAR(Rmse(P({0, 2}, {1, 0})), std::sqrt(2.5), 1e-15);
}

TEST(CorrelationTest, Examples) {
  EXPECT_DOUBLE_EQ(*Pearson(P({0, 1, 3}, {0, 1, 3})), 1.0);
  EXPECT_DOUBLE_EQ(*Spearman(P({0, 1, 3}, {0, 1, 3})), 1.0);
  EXPECT_NEAR(*Pearson(P({0, 1, 3}, {3, 2, 0})), -1.0, 1e-15);
  EXPECT_NEAR(*Spearman(P({0, 1, 3}, {3, 2, 0})), -1.0, 1e-15);

  const std::vector<int> g{0, 1, 1, 3}, p{0, 2, 1, 3};
  EXPECT_NEAR(*Pearson(P(g, p)), *oracle::Pearson(oracle::AsDouble(g), oracle::AsDouble(p)),
              1e-15);
  // Ranks of g: 1, 2.5, 2.5, 4; of p: 1, 3, 2, 4.
  EXPECT_EQ(AverageRanks(std::vector<double>{0, 1, 1, 3}), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_NEAR(*Spearman(P(g, p)),
              *oracle::Pearson({1, 2.5, 2.5, 4}, {1, 3, 2, 4}), 1e-15);
}

TEST(CorrelationTest, UndefinedCases) {
  EXPECT_FALSE(Pearson(P({2, 2, 2}, {0, 1, 2})).has_value());
  EXPECT_FALSE(Spearman(P({0, 1, 2}, {1, 1, 1})).has_value());
  EXPECT_FALSE(Pearson(P({1}, {2})).has_value());
}

TEST(BinaryTest, CohenKappaExamples) {
  EXPECT_DOUBLE_EQ(CohenKappaBinary({true, false, true}, {true, false, true}), 1.0);
  EXPECT_DOUBLE_EQ(CohenKappaBinary({true, true}, {true, true}), 1.0);
  // po = 0.5, pe = 0.5 * 0.5 + 0.5 * 0.5 = 0.5.
  EXPECT_DOUBLE_EQ(CohenKappaBinary({true, true, false, false}, {true, false, true, false}), 0.0);
  EXPECT_EQ(CodeOf([] { CohenKappaBinary({true}, {}); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(CodeOf([] { CohenKappaBinary({}, {}); }), ErrorCode::kEmptyInput);
}

TEST(BinaryTest, F1Examples) {
  EXPECT_DOUBLE_EQ(F1Binary({true, false}, {true, false}), 1.0);
  EXPECT_DOUBLE_EQ(F1Binary({true, false}, {false, true}), 0.0);
  EXPECT_NEAR(F1Binary({true, true, false}, {true, false, false}), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(F1Binary({false, false}, {false, false}), 1.0);
  EXPECT_DOUBLE_EQ(F1Binary({true, true}, {false, false}), 0.0);
}

TEST(CountAgreementTest, Examples) {
  CountAgreement same = CountAgreementOf({1, 2, 3}, {1, 2, 3});
  EXPECT_EQ(same.mae, 0.0);
  EXPECT_EQ(same.rmse, 0.0);
  EXPECT_DOUBLE_EQ(*same.pearson, 1.0);
  EXPECT_EQ(same.exact_match_rate, 1.0);
  EXPECT_FALSE(CountAgreementOf({2, 2}, {2, 2}).pearson.has_value());

  CountAgreement a = CountAgreementOf({1, 2, 0}, {1, 1, 0});
  EXPECT_NEAR(a.mae, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a.exact_match_rate, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(CodeOf([] { CountAgreementOf({}, {}); }), ErrorCode::kEmptyInput);
}

TEST(MetricsPropertyTest, MatchesNaiveOraclesOnRandomInstances) {
  std::mt19937_64 rng(20260213);
  for (int trial = 0; trial < 1000; ++trial) {
    oracle::Instance in = oracle::RandomInstance(rng);
    PairedScores p(in.gold, in.pred, ScoreRange(in.min, in.max));
    SCOPED_TRACE(trial);
    EXPECT_NEAR(Accuracy(p), oracle::Accuracy(in.gold, in.pred), 1e-12);
    EXPECT_NEAR(Qwk(p), oracle::Qwk(in.gold, in.pred), 1e-12);
    EXPECT_NEAR(Mae(p), oracle::Mae(in.gold, in.pred), 1e-12);
    EXPECT_NEAR(Rmse(p), oracle::Rmse(in.gold, in.pred), 1e-12);
    auto gd = oracle::AsDouble(in.gold), pd = oracle::AsDouble(in.pred);
    auto pearson = Pearson(p), want_pearson = oracle::Pearson(gd, pd);
    ASSERT_EQ(pearson.has_value(), want_pearson.has_value());
    if (pearson) EXPECT_NEAR(*pearson, *want_pearson, 1e-12);
    auto spearman = Spearman(p), want_spearman = oracle::Spearman(gd, pd);
    ASSERT_EQ(spearman.has_value(), want_spearman.has_value());
    if (spearman) EXPECT_NEAR(*spearman, *want_spearman, 1e-12);
    EXPECT_NEAR(CohenKappaBinary(in.gold_flags, in.pred_flags),
                oracle::CohenKappa(in.gold_flags, in.pred_flags), 1e-12);
    EXPECT_NEAR(F1Binary(in.gold_flags, in.pred_flags), oracle::F1(in.gold_flags, in.pred_flags),
                1e-12);
  }
}

TEST(MetricsPropertyTest, ReportInvariants) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    oracle::Instance in = oracle::RandomInstance(rng);
    MetricsReport r =
        ComputeMetrics(PairedScores(in.gold, in.pred, ScoreRange(in.min, in.max)), "x");
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
    EXPECT_GE(r.qwk, -1.0 - 1e-12);
    EXPECT_LE(r.qwk, 1.0 + 1e-12);
    EXPECT_LE(r.mae, r.rmse + 1e-12);
    int total = 0;
    for (const auto& row : r.confusion) {
      ASSERT_EQ(row.size(), static_cast<std::size_t>(in.max - in.min + 1));
      for (int c : row) total += c;
    }
    EXPECT_EQ(total, static_cast<int>(r.n));
    // Swapping raters leaves every symmetric statistic unchanged.
    MetricsReport s =
        ComputeMetrics(PairedScores(in.pred, in.gold, ScoreRange(in.min, in.max)), "x");
    EXPECT_NEAR(r.qwk, s.qwk, 1e-12);
    EXPECT_NEAR(r.mae, s.mae, 1e-12);
  }
}

TEST(MetricsReportTest, JsonRoundTripAndNulls) {
  MetricsReport r = ComputeMetrics(P({2, 2, 2}, {1, 2, 3}), "flat gold", 2);
  EXPECT_FALSE(r.pearson.has_value());
  Json j = ToJson(r);
  EXPECT_TRUE(j["pearson"].is_null());
  EXPECT_EQ(j["failures"], 2);
  MetricsReport back = MetricsReportFromJson(j);
  EXPECT_EQ(ToJson(back), j);
  EXPECT_NE(RenderText(r).find("undefined"), std::string::npos);
}

RunResult SmallRun() {
  RunResult run;
  run.manifest.context.score_range = ScoreRange(0, 3);
  for (auto [id, g, p] : {std::tuple{"a", 1, 1}, {"b", 2, 3}, {"c", 0, 0}}) {
    ScoredRecord r;
    r.response_id = id;
    r.mode = Mode::kBaseline;
    r.gold_score = g;
    r.predicted_score = p;
    run.records.push_back(r);
  }
  run.failures.push_back(FailureRecord{"d", "ScoringFailed", "x", 3});
  return run;
}

TEST(EvaluateRunTest, FailuresExcludedOrFloored) {
  RunResult run = SmallRun();
  MetricsReport dropped = EvaluateRun(run, "run");
  EXPECT_EQ(dropped.n, 3u);
  EXPECT_EQ(dropped.failures, 1u);
  EXPECT_NEAR(dropped.accuracy, 2.0 / 3.0, 1e-15);

  MetricsReport floored = EvaluateRun(run, "run", ImputationPolicy::kFloor);
  EXPECT_EQ(floored.n, 4u);
  EXPECT_EQ(floored.failures, 1u);
  EXPECT_NEAR(floored.mae, (0 + 1 + 0 + 3) / 4.0, 1e-15);
}

TEST(EvaluateRunTest, AllCorrectAndMissingGold) {
  RunResult run = SmallRun();
  run.records[1].predicted_score = 2;
  MetricsReport r = EvaluateRun(run, "run");
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.qwk, 1.0);
  EXPECT_EQ(r.mae, 0.0);

  run.records[0].gold_score.reset();
  EXPECT_EQ(CodeOf([&] { EvaluateRun(run, "run"); }), ErrorCode::kNoGold);
  run.records.clear();
  EXPECT_EQ(CodeOf([&] { EvaluateRun(run, "run"); }), ErrorCode::kEmptyInput);
  EXPECT_EQ(ParseImputationPolicy("floor"), ImputationPolicy::kFloor);
  EXPECT_EQ(CodeOf([] { ParseImputationPolicy("mean"); }), ErrorCode::kConfig);
}

struct ReliabilityFixture {
  ComponentSchema schema = CompileSchema(
      "reliability", Json::parse(io::ReadFile(DataPath("reliability/schema.json"))));
  std::map<std::string, StructuredRepresentation> predicted;
  std::vector<GoldAnnotation> gold = LoadGoldAnnotations(DataPath("reliability/gold.jsonl"));
  Json expected = Json::parse(io::ReadFile(DataPath("reliability/expected.json")));

  ReliabilityFixture() {
    for (const auto& line : io::ReadJsonLines(DataPath("reliability/predicted.jsonl"))) {
      predicted.emplace(line["response_id"].get<std::string>(),
                        ValidateRepresentationObject(line["values"], schema));
    }
  }
};

TEST(ValidateComponentsTest, ReproducesOracleReport) {
  ReliabilityFixture fx;
  ReliabilityReport r = ValidateComponents(fx.predicted, fx.gold, fx.schema);
  Json got = ToJson(r);
  const Json& want = fx.expected;
  EXPECT_EQ(got["schema_id"], want["schema_id"]);
  EXPECT_EQ(got["n"], want["n"]);
  ASSERT_EQ(got["boolean_fields"].size(), want["boolean_fields"].size());
  for (std::size_t i = 0; i < want["boolean_fields"].size(); ++i) {
    for (const char* key : {"accuracy", "f1", "cohen_kappa"}) {
      EXPECT_NEAR(got["boolean_fields"][i][key].get<double>(),
                  want["boolean_fields"][i][key].get<double>(), 1e-12)
          << want["boolean_fields"][i]["field"] << " " << key;
    }
  }
  ASSERT_EQ(got["count_fields"].size(), want["count_fields"].size());
  for (std::size_t i = 0; i < want["count_fields"].size(); ++i) {
    EXPECT_EQ(got["count_fields"][i]["field"], want["count_fields"][i]["field"]);
    for (const char* key : {"mae", "rmse", "pearson", "exact_match_rate"}) {
      EXPECT_NEAR(got["count_fields"][i][key].get<double>(),
                  want["count_fields"][i][key].get<double>(), 1e-12)
          << want["count_fields"][i]["field"] << " " << key;
    }
  }
  EXPECT_NEAR(r.exact_match_rate, want["exact_match_rate"].get<double>(), 1e-12);
  EXPECT_NE(RenderText(r).find("all counts exact match"), std::string::npos);
}

TEST(ValidateComponentsTest, AlignmentAndSchemaErrors) {
  ReliabilityFixture fx;
  auto missing = fx.predicted;
  missing.erase("r3");
  EXPECT_EQ(CodeOf([&] { ValidateComponents(missing, fx.gold, fx.schema); }),
            ErrorCode::kAlignmentError);

  auto gold = fx.gold;
  gold[0].values.erase("claim_count");
  EXPECT_EQ(CodeOf([&] { ValidateComponents(fx.predicted, gold, fx.schema); }),
            ErrorCode::kSchemaMismatch);

  gold = fx.gold;
  gold[1].values["design_present"] = "yes";
  EXPECT_EQ(CodeOf([&] { ValidateComponents(fx.predicted, gold, fx.schema); }),
            ErrorCode::kSchemaMismatch);

  gold = fx.gold;
  gold.push_back(gold[0]);
  EXPECT_EQ(CodeOf([&] { ValidateComponents(fx.predicted, gold, fx.schema); }),
            ErrorCode::kAlignmentError);
}

}  // namespace
}  // namespace autoscore
