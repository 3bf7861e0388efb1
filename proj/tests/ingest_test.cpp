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

#include "autoscore/ingest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "autoscore/error.hpp"
#include "test_util.hpp"

namespace autoscore {
namespace {

using testing::TempDir;
using testing::WriteText;

template <typename F>
ErrorCode CodeOf(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no autoscore::Error thrown";
  return ErrorCode::kIo;
}

constexpr const char* kSasHeader = "Id\tEssaySet\tScore1\tScore2\tEssayText\n";
constexpr const char* kAesHeader =
    "essay_id\tessay_set\tessay\trater1_domain1\trater2_domain1\tdomain1_score\n";

DatasetSpec Sas(const std::filesystem::path& path, int set = 1) {
  return DatasetSpec{DatasetFamily::kSas, path, set, GoldRule::kFirstRater, "item"};
}

TEST(LoadSasTest, SelectsEssaySetAndFirstRater) {
  TempDir tmp;
  WriteText(tmp / "d.tsv", std::string(kSasHeader) +
                               "1\t1\t2\t1\tFirst answer.\n"
                               "2\t2\t0\t0\tOther set.\r\n"
                               "3\t1\t0\t3\t\"Quoted\" answer with a \"\"quote\"\".\r\n"
                               "\n");
  Dataset d = LoadSas(Sas(tmp / "d.tsv"), ScoreRange(0, 3));
  ASSERT_EQ(d.responses.size(), 2u);
  EXPECT_EQ(d.responses[0].response_id, "1");
  EXPECT_EQ(d.responses[0].gold_score, 2);
  EXPECT_EQ(d.responses[0].item_id, "item");
  EXPECT_EQ(d.responses[1].gold_score, 0);
  // No CSV-style unquoting: text is kept as stored.
  EXPECT_EQ(d.responses[1].text, "\"Quoted\" answer with a \"\"quote\"\".");
}

TEST(LoadSasTest, HandlesBomAndLatin1) {
  TempDir tmp;
  WriteText(tmp / "d.tsv", "\xEF\xBB\xBF" + std::string(kSasHeader) + "1\t1\t1\t1\tcaf\xE9\n");
  Dataset d = LoadSas(Sas(tmp / "d.tsv"), ScoreRange(0, 3));
  EXPECT_EQ(d.responses[0].text, "caf\xC3\xA9");
}

TEST(LoadSasTest, Errors) {
  TempDir tmp;
  const ScoreRange r(0, 3);
  WriteText(tmp / "cols.tsv", "Id\tEssaySet\tScore1\tEssayText\n1\t1\t1\tx\n");
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "cols.tsv"), r); }), ErrorCode::kMissingColumn);
  WriteText(tmp / "short.tsv", std::string(kSasHeader) + "1\t1\t1\n");
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "short.tsv"), r); }), ErrorCode::kMalformedRow);
  WriteText(tmp / "nonint.tsv", std::string(kSasHeader) + "1\t1\tx\t1\ttext\n");
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "nonint.tsv"), r); }), ErrorCode::kMalformedRow);
  WriteText(tmp / "range.tsv", std::string(kSasHeader) + "1\t1\t7\t1\ttext\n");
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "range.tsv"), r); }), ErrorCode::kMalformedRow);
  WriteText(tmp / "blank.tsv", std::string(kSasHeader) + "1\t1\t1\t1\t  \n");
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "blank.tsv"), r); }), ErrorCode::kMalformedRow);
  WriteText(tmp / "dup.tsv", std::string(kSasHeader) + "1\t1\t1\t1\ta\n1\t1\t1\t1\tb\n");
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "dup.tsv"), r); }), ErrorCode::kMalformedRow);
  WriteText(tmp / "ok.tsv", std::string(kSasHeader) + "1\t1\t1\t1\ta\n");
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "ok.tsv", 5), r); }), ErrorCode::kEmptySelection);
  EXPECT_EQ(CodeOf([&] { LoadSas(Sas(tmp / "missing.tsv"), r); }), ErrorCode::kIo);
  DatasetSpec resolved = Sas(tmp / "ok.tsv");
  resolved.gold_rule = GoldRule::kResolvedColumn;
  EXPECT_EQ(CodeOf([&] { LoadSas(resolved, r); }), ErrorCode::kConfig);
}

TEST(LoadAesTest, GoldRuleChoosesColumn) {
  TempDir tmp;
  WriteText(tmp / "a.tsv", std::string(kAesHeader) + "10\t1\tDear editor\t4\t5\t9\n"
                                                     "11\t2\tOther\t2\t2\t4\n");
  DatasetSpec spec{DatasetFamily::kAes, tmp / "a.tsv", 1, GoldRule::kFirstRater, "essay1"};
  EXPECT_EQ(LoadDataset(spec, ScoreRange(1, 6)).responses[0].gold_score, 4);
  spec.gold_rule = GoldRule::kResolvedColumn;
  EXPECT_EQ(LoadDataset(spec, ScoreRange(2, 12)).responses[0].gold_score, 9);
  // The resolved score of set 1 lies outside the single-rater 1..6 scale.
  EXPECT_EQ(CodeOf([&] { LoadDataset(spec, ScoreRange(1, 6)); }), ErrorCode::kMalformedRow);
}

TEST(ParseEnumsTest, Names) {
  EXPECT_EQ(ParseDatasetFamily("aes"), DatasetFamily::kAes);
  EXPECT_EQ(ParseGoldRule("resolved_column"), GoldRule::kResolvedColumn);
  EXPECT_EQ(CodeOf([] { ParseDatasetFamily("csv"); }), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf([] { ParseGoldRule("mean"); }), ErrorCode::kConfig);
}

Dataset Synthetic(std::size_t n) {
  Dataset d;
  for (std::size_t i = 1; i <= n; ++i) {
    d.responses.push_back(StudentResponse{std::to_string(i), "x", "text " + std::to_string(i), 1});
  }
  return d;
}

TEST(DigestTest, MatchesIndependentHashAndIgnoresRowOrder) {
  Dataset d;
  d.responses = {{"10", "x", "gamma", 0}, {"1", "x", "alpha", 0}, {"2", "x", "beta", 0}};
  // Frozen from Python hashlib over id NUL text LF in numeric id order.
  EXPECT_EQ(d.Digest(), "d07ed15afb5b04ed8d060e55a36dc1fa82079f9528cddf5f7738f5532e97e8fa");
  std::reverse(d.responses.begin(), d.responses.end());
  EXPECT_EQ(d.Digest(), "d07ed15afb5b04ed8d060e55a36dc1fa82079f9528cddf5f7738f5532e97e8fa");
  d.responses[0].text += " ";
  EXPECT_NE(d.Digest(), "d07ed15afb5b04ed8d060e55a36dc1fa82079f9528cddf5f7738f5532e97e8fa");
}

TEST(SampleTest, SizesOfTheSubsetExperiments) {
  EXPECT_EQ(SampleSize(1290, 0.2), 258u);
  EXPECT_EQ(SampleSize(1850, 0.2), 370u);
  EXPECT_EQ(SampleSize(5, 0.5), 3u);   // 2.5 rounds up
  EXPECT_EQ(SampleSize(3, 0.5), 2u);   // 1.5 rounds up
  EXPECT_EQ(SampleSize(10, 1.0), 10u);
  EXPECT_EQ(Sample(Synthetic(1290), 0.2, 0).responses.size(), 258u);
  EXPECT_EQ(Sample(Synthetic(1850), 0.2, 0).responses.size(), 370u);
  EXPECT_EQ(CodeOf([] { SampleSize(10, 0.0); }), ErrorCode::kInvalidValue);
  EXPECT_EQ(CodeOf([] { SampleSize(10, 1.5); }), ErrorCode::kInvalidValue);
}

TEST(SampleTest, SelectionMatchesIndependentOracle) {
  std::vector<std::string> ids;
  for (int i = 20; i >= 1; --i) ids.push_back(std::to_string(i));
  // Frozen from Python: ids sorted by sha256("7\x1f" + id), first 5, numeric order.
  EXPECT_EQ(SampleIds(ids, 0.25, 7), (std::vector<std::string>{"1", "5", "11", "14", "15"}));
}

TEST(SampleTest, ReproducibleAndOrderIndependent) {
  Dataset d = Synthetic(500);
  Dataset a = Sample(d, 0.2, 42);
  std::reverse(d.responses.begin(), d.responses.end());
  Dataset b = Sample(d, 0.2, 42);
  ASSERT_EQ(a.responses.size(), 100u);
  for (std::size_t i = 0; i < a.responses.size(); ++i) {
    EXPECT_EQ(a.responses[i].response_id, b.responses[i].response_id);
  }
  EXPECT_TRUE(std::is_sorted(a.responses.begin(), a.responses.end(), [](const auto& x, const auto& y) {
    return ResponseIdLess(x.response_id, y.response_id);
  }));
  Dataset c = Sample(d, 0.2, 43);
  std::set<std::string> sa, sc;
  for (const auto& r : a.responses) sa.insert(r.response_id);
  for (const auto& r : c.responses) sc.insert(r.response_id);
  EXPECT_NE(sa, sc);
  // Growing the fraction keeps earlier picks.
  Dataset bigger = Sample(d, 0.4, 42);
  std::set<std::string> sb;
  for (const auto& r : bigger.responses) sb.insert(r.response_id);
  EXPECT_TRUE(std::includes(sb.begin(), sb.end(), sa.begin(), sa.end()));
}

}  // namespace
}  // namespace autoscore
