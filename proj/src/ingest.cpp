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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <set>
#include <unordered_map>

#include "autoscore/backend.hpp"
#include "autoscore/error.hpp"
#include "autoscore/io.hpp"

namespace autoscore {
namespace {

bool IsValidUtf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c >> 5) == 0x6) {
      extra = 1;
    } else if ((c >> 4) == 0xE) {
      extra = 2;
    } else if ((c >> 3) == 0x1E) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size() && extra > 0) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

std::string Latin1ToUtf8(std::string_view s) {
  std::string out;
  out.reserve(s.size() + s.size() / 8);
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      out.push_back(ch);
    } else {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      return cells;
    }
    cells.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::optional<int> ParseInt(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"')) s.remove_suffix(1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

struct Layout {
  std::string id;
  std::string set;
  std::string text;
  std::string gold;
  std::vector<std::string> required;
};

Dataset LoadTsv(const DatasetSpec& spec, const ScoreRange& range, const Layout& layout) {
  if (spec.essay_set <= 0) {
    throw Error(ErrorCode::kConfig, "essay_set must be positive");
  }
  const std::string data = io::ReadFile(spec.tsv_path);
  const std::string where = spec.tsv_path.string();

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!IsValidUtf8(line)) line = Latin1ToUtf8(line);
    lines.push_back(std::move(line));
    start = end + 1;
  }
  if (lines.empty() || lines.front().empty()) {
    throw Error(ErrorCode::kMissingColumn, where + ": no header row");
  }

  std::string header = lines.front();
  if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
  std::unordered_map<std::string, std::size_t> columns;
  auto header_cells = SplitTabs(header);
  for (std::size_t i = 0; i < header_cells.size(); ++i) columns.emplace(header_cells[i], i);
  for (const auto& name : layout.required) {
    if (!columns.contains(name)) throw Error(ErrorCode::kMissingColumn, where + ": " + name);
  }
  const std::size_t id_col = columns.at(layout.id);
  const std::size_t set_col = columns.at(layout.set);
  const std::size_t text_col = columns.at(layout.text);
  const std::size_t gold_col = columns.at(layout.gold);
  const std::size_t needed = std::max({id_col, set_col, text_col, gold_col}) + 1;

  Dataset dataset;
  dataset.spec = spec;
  std::set<std::string> seen;
  for (std::size_t line_no = 2; line_no <= lines.size(); ++line_no) {
    const std::string& line = lines[line_no - 1];
    if (line.empty()) continue;
    auto malformed = [&](const std::string& why) {
      return Error(ErrorCode::kMalformedRow, where + ":" + std::to_string(line_no) + ": " + why);
    };
    auto cells = SplitTabs(line);
    if (cells.size() < needed) throw malformed("expected at least " + std::to_string(needed) + " columns");
    auto set = ParseInt(cells[set_col]);
    if (!set) throw malformed("non-integer " + layout.set);
    if (*set != spec.essay_set) continue;

    auto gold = ParseInt(cells[gold_col]);
    if (!gold) throw malformed("non-integer " + layout.gold);
    StudentResponse response{cells[id_col], spec.item_id, cells[text_col], *gold};
    try {
      response.Validate(range);
    } catch (const Error& e) {
      throw malformed(e.what());
    }
    if (!seen.insert(response.response_id).second) {
      throw malformed("duplicate id " + response.response_id);
    }
    dataset.responses.push_back(std::move(response));
  }
  if (dataset.responses.empty()) {
    throw Error(ErrorCode::kEmptySelection,
                where + ": no rows for essay set " + std::to_string(spec.essay_set));
  }
  return dataset;
}

}  // namespace

DatasetFamily ParseDatasetFamily(std::string_view name) {
  if (name == "sas") return DatasetFamily::kSas;
  if (name == "aes") return DatasetFamily::kAes;
  throw Error(ErrorCode::kConfig, "unknown dataset family '" + std::string(name) + "'");
}

GoldRule ParseGoldRule(std::string_view name) {
  if (name == "first_rater") return GoldRule::kFirstRater;
  if (name == "resolved_column") return GoldRule::kResolvedColumn;
  throw Error(ErrorCode::kConfig, "unknown gold rule '" + std::string(name) + "'");
}

std::string Dataset::Digest() const {
  std::vector<const StudentResponse*> sorted;
  for (const auto& r : responses) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return ResponseIdLess(a->response_id, b->response_id);
  });
  std::string material;
  for (const auto* r : sorted) {
    material += r->response_id;
    material.push_back('\0');
    material += r->text;
    material.push_back('\n');
  }
  return Sha256Hex(material);
}

Dataset LoadSas(const DatasetSpec& spec, const ScoreRange& range) {
  if (spec.gold_rule == GoldRule::kResolvedColumn) {
    throw Error(ErrorCode::kConfig, "ASAP-SAS has no resolved score column; use first_rater");
  }
  Layout layout{"Id", "EssaySet", "EssayText", "Score1",
                {"Id", "EssaySet", "Score1", "Score2", "EssayText"}};
  return LoadTsv(spec, range, layout);
}

Dataset LoadAes(const DatasetSpec& spec, const ScoreRange& range) {
  Layout layout{"essay_id", "essay_set", "essay",
                spec.gold_rule == GoldRule::kFirstRater ? "rater1_domain1" : "domain1_score",
                {"essay_id", "essay_set", "essay", "rater1_domain1", "rater2_domain1",
                 "domain1_score"}};
  return LoadTsv(spec, range, layout);
}

Dataset LoadDataset(const DatasetSpec& spec, const ScoreRange& range) {
  return spec.family == DatasetFamily::kSas ? LoadSas(spec, range) : LoadAes(spec, range);
}

std::size_t SampleSize(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidValue, "sample fraction must lie in (0, 1]");
  }
  // The epsilon absorbs binary representation error, e.g. 0.2 * 1850.
  double exact = fraction * static_cast<double>(n);
  return std::min(n, static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9)));
}

std::vector<std::string> SampleIds(std::vector<std::string> ids, double fraction,
                                   std::uint64_t seed) {
  std::size_t k = SampleSize(ids.size(), fraction);
  std::vector<std::pair<std::string, std::string>> keyed;
  keyed.reserve(ids.size());
  const std::string prefix = std::to_string(seed) + "\x1f";
  for (auto& id : ids) keyed.emplace_back(Sha256Hex(prefix + id), std::move(id));
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> chosen;
  chosen.reserve(k);
  for (std::size_t i = 0; i < k; ++i) chosen.push_back(std::move(keyed[i].second));
  std::sort(chosen.begin(), chosen.end(),
            [](const std::string& a, const std::string& b) { return ResponseIdLess(a, b); });
  return chosen;
}

Dataset Sample(const Dataset& dataset, double fraction, std::uint64_t seed) {
  std::vector<std::string> ids;
  std::unordered_map<std::string, const StudentResponse*> by_id;
  for (const auto& r : dataset.responses) {
    ids.push_back(r.response_id);
    by_id.emplace(r.response_id, &r);
  }
  Dataset out;
  out.spec = dataset.spec;
  for (const auto& id : SampleIds(std::move(ids), fraction, seed)) {
    out.responses.push_back(*by_id.at(id));
  }
  return out;
}

}  // namespace autoscore
