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

#include "autoscore/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <variant>

#include <spdlog/spdlog.h>

#include "autoscore/error.hpp"
#include "autoscore/io.hpp"

namespace autoscore {
namespace {

std::string UtcNow() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest MakeManifest(const RunConfig& config, const Dataset& dataset,
                         const ItemBinding& item, const ChatBackend& backend) {
  RunManifest m;
  m.item_id = item.context.item_id;
  m.mode = config.mode;
  m.model_name = config.agent.model_name;
  m.backend_identity = backend.Identity();
  m.dataset_digest = dataset.Digest();
  m.dataset_size = dataset.responses.size();
  m.context = item.context;
  m.config = config.snapshot;
  return m;
}

void CheckCompatible(const RunManifest& existing, const RunManifest& wanted) {
  auto check = [](const std::string& what, const std::string& have, const std::string& want) {
    if (have != want) {
      throw Error(ErrorCode::kManifestMismatch,
                  what + " is '" + have + "' in the run directory but '" + want + "' now");
    }
  };
  check("mode", std::string(ModeName(existing.mode)), std::string(ModeName(wanted.mode)));
  check("item", existing.item_id, wanted.item_id);
  check("model", existing.model_name, wanted.model_name);
  check("backend", existing.backend_identity, wanted.backend_identity);
  check("dataset digest", existing.dataset_digest, wanted.dataset_digest);
}

using Outcome = std::variant<ScoredRecord, FailureRecord>;

Outcome ScoreOne(const RunConfig& config, const ItemBinding& item,
                 const StudentResponse& response, ChatBackend& backend) {
  try {
    ScoredRecord record;
    record.response_id = response.response_id;
    record.mode = config.mode;
    record.gold_score = response.gold_score;
    if (config.mode == Mode::kAutoscore) {
      auto extracted =
          RunExtraction(backend, item.context, response, *item.schema, item.prompts, config.agent);
      auto scored = RunScoring(backend, extracted.value, item.context, response, item.prompts,
                               config.agent);
      record.predicted_score = scored.value.value();
      record.representation = std::move(extracted.value);
      record.transcripts = std::move(extracted.transcripts);
      record.transcripts.insert(record.transcripts.end(), scored.transcripts.begin(),
                                scored.transcripts.end());
      record.wall_time_ms = extracted.wall_time_ms + scored.wall_time_ms;
      record.retries = extracted.retries + scored.retries;
    } else {
      auto scored = RunBaseline(backend, item.context, response, item.prompts, config.agent);
      record.predicted_score = scored.value.value();
      record.transcripts = std::move(scored.transcripts);
      record.wall_time_ms = scored.wall_time_ms;
      record.retries = scored.retries;
    }
    return record;
  } catch (const Error& e) {
    return FailureRecord{response.response_id, std::string(ErrorCodeName(e.code())), e.what(),
                         response.gold_score};
  } catch (const std::exception& e) {
    return FailureRecord{response.response_id, "Internal", e.what(), response.gold_score};
  }
}

void ValidateInputs(const RunConfig& config, const Dataset& dataset, const ItemBinding& item) {
  if (config.parallelism < 1) throw Error(ErrorCode::kConfig, "parallelism must be >= 1");
  if (config.agent.max_retries < 0) throw Error(ErrorCode::kConfig, "max_retries must be >= 0");
  if (config.run_dir.empty()) throw Error(ErrorCode::kConfig, "run_dir not set");
  item.context.Validate();
  if (config.mode == Mode::kAutoscore) {
    if (!item.schema) {
      throw Error(ErrorCode::kConfig, "autoscore mode needs a schema for " + item.context.item_id);
    }
    if (item.schema->item_id() != item.context.item_id) {
      throw Error(ErrorCode::kConfig, "schema " + item.schema->item_id() + " bound to item " +
                                          item.context.item_id);
    }
  }
  std::set<std::string> ids;
  for (const auto& r : dataset.responses) {
    if (r.item_id != item.context.item_id) {
      throw Error(ErrorCode::kConfig, "response " + r.response_id + " belongs to item '" +
                                          r.item_id + "', not '" + item.context.item_id + "'");
    }
    try {
      r.Validate(item.context.score_range);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, e.what());
    }
    if (!ids.insert(r.response_id).second) {
      throw Error(ErrorCode::kConfig, "duplicate response id " + r.response_id);
    }
  }
}

RunResult Execute(const RunConfig& config, const Dataset& dataset, const ItemBinding& item,
                  ChatBackend& backend, RunManifest manifest, RunResult previous) {
  std::set<std::string> done;
  for (const auto& r : previous.records) done.insert(r.response_id);
  for (const auto& f : previous.failures) done.insert(f.response_id);

  std::vector<const StudentResponse*> pending;
  for (const auto& r : dataset.responses) {
    if (!done.contains(r.response_id)) pending.push_back(&r);
  }
  std::sort(pending.begin(), pending.end(), [](const auto* a, const auto* b) {
    return ResponseIdLess(a->response_id, b->response_id);
  });
  spdlog::info("{} run of '{}': {} responses, {} already done, {} to score",
               ModeName(config.mode), item.context.item_id, dataset.responses.size(),
               done.size(), pending.size());

  io::WriteFileAtomic(config.run_dir / kResponsesFile, ResponsesJsonl(dataset.responses));
  RunResult result;
  for (const auto& r : dataset.responses) result.response_texts[r.response_id] = r.text;
  result.records = std::move(previous.records);
  result.failures = std::move(previous.failures);

  if (!pending.empty()) {
    io::LineAppender records_out(config.run_dir / kRecordsFile);
    io::LineAppender failures_out(config.run_dir / kFailuresFile);
    std::mutex out_mutex;
    std::atomic<std::size_t> next{0};
    std::size_t completed = 0;
    std::exception_ptr io_failure;

    auto worker = [&] {
      for (std::size_t i = next++; i < pending.size(); i = next++) {
        Outcome outcome = ScoreOne(config, item, *pending[i], backend);
        std::scoped_lock lock(out_mutex);
        if (io_failure) return;
        try {
          if (auto* record = std::get_if<ScoredRecord>(&outcome)) {
            records_out.Append(ToJson(*record).dump());
            result.records.push_back(std::move(*record));
          } else {
            auto& failure = std::get<FailureRecord>(outcome);
            spdlog::warn("response {} failed: {}", failure.response_id, failure.message);
            failures_out.Append(ToJson(failure).dump());
            result.failures.push_back(std::move(failure));
          }
        } catch (...) {
          io_failure = std::current_exception();
          return;
        }
        if (++completed % config.progress_every == 0) {
          spdlog::info("{}/{} responses done", completed, pending.size());
        }
      }
    };
    const auto workers = std::min<std::size_t>(config.parallelism, pending.size());
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();  // joins
    if (io_failure) std::rethrow_exception(io_failure);
  }

  std::sort(result.records.begin(), result.records.end(), [](const auto& a, const auto& b) {
    return ResponseIdLess(a.response_id, b.response_id);
  });
  std::sort(result.failures.begin(), result.failures.end(), [](const auto& a, const auto& b) {
    return ResponseIdLess(a.response_id, b.response_id);
  });
  io::WriteFileAtomic(config.run_dir / kRecordsFile, RecordsJsonl(result.records));
  io::WriteFileAtomic(config.run_dir / kFailuresFile, FailuresJsonl(result.failures));
  io::WriteFileAtomic(config.run_dir / kTimingFile, TimingCsv(result.records));
  manifest.finished_at = UtcNow();
  io::WriteFileAtomic(config.run_dir / kManifestFile, ToJson(manifest).dump(2) + "\n");
  result.manifest = std::move(manifest);
  spdlog::info("run finished: {} scored, {} failed", result.records.size(),
               result.failures.size());
  return result;
}

}  // namespace

RunResult ScoreDataset(const RunConfig& config, const Dataset& dataset, const ItemBinding& item,
                       ChatBackend& backend) {
  ValidateInputs(config, dataset, item);
  std::filesystem::create_directories(config.run_dir);
  for (const char* file : {kRecordsFile, kFailuresFile}) {
    auto path = config.run_dir / file;
    if (std::filesystem::exists(path) && std::filesystem::file_size(path) > 0) {
      throw Error(ErrorCode::kIo, config.run_dir.string() +
                                      " already holds a run; resume it or choose another directory");
    }
  }
  RunManifest manifest = MakeManifest(config, dataset, item, backend);
  manifest.started_at = UtcNow();
  io::WriteFileAtomic(config.run_dir / kManifestFile, ToJson(manifest).dump(2) + "\n");
  return Execute(config, dataset, item, backend, std::move(manifest), RunResult{});
}

RunResult Resume(const RunConfig& config, const Dataset& dataset, const ItemBinding& item,
                 ChatBackend& backend) {
  ValidateInputs(config, dataset, item);
  RunResult previous = LoadRun(config.run_dir);
  RunManifest wanted = MakeManifest(config, dataset, item, backend);
  CheckCompatible(previous.manifest, wanted);
  wanted.started_at = previous.manifest.started_at;
  return Execute(config, dataset, item, backend, std::move(wanted), std::move(previous));
}

}  // namespace autoscore
