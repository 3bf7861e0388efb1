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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autoscore/core_model.hpp"

namespace autoscore {

enum class DatasetFamily { kSas, kAes };
enum class GoldRule { kFirstRater, kResolvedColumn };

DatasetFamily ParseDatasetFamily(std::string_view name);
GoldRule ParseGoldRule(std::string_view name);

struct DatasetSpec {
  DatasetFamily family = DatasetFamily::kSas;
  std::filesystem::path tsv_path;
  int essay_set = 1;
  GoldRule gold_rule = GoldRule::kFirstRater;
  std::string item_id;
};

struct Dataset {
  DatasetSpec spec;
  std::vector<StudentResponse> responses;

  /// SHA-256 over every (response_id, text) pair in response-id order.
  std::string Digest() const;
};

/// ASAP-SAS layout: Id, EssaySet, Score1, Score2, EssayText.
/// Gold is Score1 (first_rater); resolved_column is not available for SAS.
Dataset LoadSas(const DatasetSpec& spec, const ScoreRange& range);

/// ASAP-AES layout: essay_id, essay_set, essay, rater1_domain1,
/// rater2_domain1, domain1_score. Gold is rater1_domain1 (first_rater) or
/// domain1_score (resolved_column).
Dataset LoadAes(const DatasetSpec& spec, const ScoreRange& range);

/// Dispatches on spec.family.
Dataset LoadDataset(const DatasetSpec& spec, const ScoreRange& range);

/// Reproducible subset of round-half-up(fraction * size) responses. Which
/// responses are chosen depends only on the seed and the response ids; the
/// result is ordered by response id. Throws kInvalidValue unless
/// 0 < fraction <= 1.
Dataset Sample(const Dataset& dataset, double fraction, std::uint64_t seed);

/// Ids selected by Sample, for callers that only hold ids.
std::vector<std::string> SampleIds(std::vector<std::string> ids, double fraction,
                                   std::uint64_t seed);

/// round-half-up(fraction * n).
std::size_t SampleSize(std::size_t n, double fraction);

}  // namespace autoscore
