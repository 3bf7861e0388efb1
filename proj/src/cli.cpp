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

#include "autoscore/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "autoscore/config.hpp"
#include "autoscore/io.hpp"
#include "autoscore/metrics.hpp"
#include "autoscore/pipeline.hpp"
#include "autoscore/report.hpp"
#include "autoscore/run.hpp"

namespace autoscore {
namespace {

namespace fs = std::filesystem;

struct ScoreFlags {
  std::string config;
  std::string item;
  std::string mode = "autoscore";
  std::string backend = "remote";
  std::optional<int> parallelism;
  std::optional<int> max_retries;
  std::optional<std::string> model;
  std::string out;
  bool resume = false;
};

struct EvaluateFlags {
  std::vector<std::string> runs;
  std::string out = "reports";
  std::string imputation = "fail";
};

struct ValidateFlags {
  std::string run;
  std::string gold;
  std::optional<double> sample_fraction;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

struct TradeoffFlags {
  std::vector<std::string> runs;
  std::string out = "tradeoff.csv";
};

struct CaseFlags {
  std::string run_autoscore;
  std::string run_baseline;
  std::string id;
  std::string out = ".";
};

struct Flags {
  bool quiet = false;
  ScoreFlags score;
  EvaluateFlags evaluate;
  ValidateFlags validate;
  TradeoffFlags tradeoff;
  CaseFlags case_study;
};

struct Subcommands {
  CLI::App* score;
  CLI::App* evaluate;
  CLI::App* validate;
  CLI::App* tradeoff;
  CLI::App* case_study;
};

Subcommands BuildApp(CLI::App& app, Flags& f) {
  app.name("autoscore");
  app.require_subcommand(1);
  app.add_flag("-q,--quiet", f.quiet, "Only log warnings and errors");

  Subcommands s{};
  s.score = app.add_subcommand("score", "Score one registered item into a run directory");
  s.score->add_option("--config", f.score.config, "Config file (JSON)")->required();
  s.score->add_option("--item", f.score.item, "Registered item id")->required();
  s.score->add_option("--mode", f.score.mode, "Scoring mode")
      ->check(CLI::IsMember({"autoscore", "baseline"}))
      ->capture_default_str();
  s.score->add_option("--backend", f.score.backend, "Completion source")
      ->check(CLI::IsMember({"remote", "replay", "scripted"}))
      ->capture_default_str();
  s.score->add_option("--parallelism", f.score.parallelism,
                      "Concurrent responses (overrides run.parallelism)")
      ->check(CLI::PositiveNumber);
  s.score->add_option("--max-retries", f.score.max_retries,
                      "Re-prompts per agent after a malformed output (overrides run.max_retries)")
      ->check(CLI::NonNegativeNumber);
  s.score->add_option("--model", f.score.model, "Model name (overrides run.model)");
  s.score->add_option("--out", f.score.out, "Run directory")->required();
  s.score->add_flag("--resume", f.score.resume,
                    "Continue the run in --out, skipping responses already recorded");

  s.evaluate = app.add_subcommand(
      "evaluate", "Agreement metrics per run; comparison table for baseline/autoscore pairs");
  s.evaluate->add_option("--run", f.evaluate.runs, "Run directory (repeatable)")
      ->required()
      ->check(CLI::ExistingDirectory);
  s.evaluate->add_option("--out", f.evaluate.out, "Report directory")->capture_default_str();
  s.evaluate->add_option("--imputation", f.evaluate.imputation,
                         "Failed responses: drop (fail) or score as the range minimum (floor)")
      ->check(CLI::IsMember({"fail", "floor"}))
      ->capture_default_str();

  s.validate = app.add_subcommand("validate-components",
                                  "Compare extracted components with gold annotations");
  s.validate->add_option("--run", f.validate.run, "Autoscore run directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  s.validate->add_option("--gold", f.validate.gold, "Gold annotations (JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  s.validate->add_option("--sample-fraction", f.validate.sample_fraction,
                         "Evaluate a seeded sample of this fraction of scored responses "
                         "(default: every response with gold)")
      ->check(CLI::Range(0.0, 1.0));
  s.validate->add_option("--seed", f.validate.seed, "Sampling seed")->capture_default_str();
  s.validate->add_option("--out", f.validate.out, "Write the report as JSON here");

  s.tradeoff = app.add_subcommand("tradeoff", "Mean inference time per response against QWK");
  s.tradeoff->add_option("--run", f.tradeoff.runs, "Run directory (repeatable)")
      ->check(CLI::ExistingDirectory);
  s.tradeoff->add_option("--out", f.tradeoff.out, "CSV output")->capture_default_str();

  s.case_study = app.add_subcommand("case", "Audit view of one response across two runs");
  s.case_study->add_option("--run-autoscore", f.case_study.run_autoscore, "Autoscore run")
      ->required()
      ->check(CLI::ExistingDirectory);
  s.case_study->add_option("--run-baseline", f.case_study.run_baseline, "Baseline run")
      ->required()
      ->check(CLI::ExistingDirectory);
  s.case_study->add_option("--id", f.case_study.id, "Response id")->required();
  s.case_study->add_option("--out", f.case_study.out, "Directory for case_<id>.md")
      ->capture_default_str();
  return s;
}

void ConfigureLogging(bool quiet) {
  auto logger = spdlog::get("autoscore");
  if (!logger) logger = spdlog::stderr_color_mt("autoscore");
  spdlog::set_default_logger(logger);
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);
}

std::string SafeName(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return s;
}

bool IsBackendError(const std::string& name) {
  return name == ErrorCodeName(ErrorCode::kTransport) ||
         name == ErrorCodeName(ErrorCode::kRateLimited);
}

int CmdScore(const ScoreFlags& f, std::ostream& out) {
  Config config = LoadConfig(f.config);
  const ItemConfig& item = config.Item(f.item);

  RunConfig run;
  run.mode = ParseMode(f.mode);
  run.parallelism = f.parallelism.value_or(config.run.parallelism);
  run.agent = config.run.agent;
  if (f.max_retries) run.agent.max_retries = *f.max_retries;
  if (f.model) run.agent.model_name = *f.model;
  run.run_dir = f.out;
  run.seed = config.run.seed;
  run.snapshot = config.raw;

  const BackendKind kind = ParseBackendKind(f.backend);
  auto backend = MakeBackend(config.backend, kind, run.parallelism);
  Dataset dataset = LoadDataset(item.dataset, item.binding.context.score_range);

  const bool resume = f.resume && fs::exists(run.run_dir / kManifestFile);
  RunResult result = resume ? Resume(run, dataset, item.binding, *backend)
                            : ScoreDataset(run, dataset, item.binding, *backend);

  std::map<std::string, int> failure_counts;
  for (const auto& failure : result.failures) ++failure_counts[failure.error];
  out << fmt::format("{} run of '{}' in {}: {} scored, {} failed\n", f.mode, f.item,
                     run.run_dir.string(), result.records.size(), result.failures.size());
  for (const auto& [error, count] : failure_counts) {
    out << fmt::format("  {}: {}\n", error, count);
  }

  const bool all_backend_failures =
      result.records.empty() && !result.failures.empty() &&
      std::all_of(result.failures.begin(), result.failures.end(),
                  [](const FailureRecord& r) { return IsBackendError(r.error); });
  if (all_backend_failures) {
    spdlog::error("no response could be scored: backend {} unreachable", backend->Identity());
    return kExitBackend;
  }
  return kExitOk;
}

std::string RunLabel(const RunManifest& m) {
  return fmt::format("{}/{}/{}", m.item_id, ModeName(m.mode), m.model_name);
}

void CheckSameDataset(const RunManifest& a, const RunManifest& b) {
  if (a.dataset_digest != b.dataset_digest) {
    throw Error(ErrorCode::kManifestMismatch,
                fmt::format("{} and {} were scored on different datasets", RunLabel(a),
                            RunLabel(b)));
  }
}

int CmdEvaluate(const EvaluateFlags& f, std::ostream& out, std::ostream& err) {
  const ImputationPolicy policy = ParseImputationPolicy(f.imputation);
  std::vector<RunResult> runs;
  for (const auto& dir : f.runs) runs.push_back(LoadRun(dir));

  // Pair baseline and autoscore runs on the same item and model; two runs of
  // different modes are always a pair.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (runs.size() == 2 && runs[0].manifest.mode != runs[1].manifest.mode) {
    if (runs[0].manifest.mode == Mode::kBaseline) {
      pairs.emplace_back(0, 1);
    } else {
      pairs.emplace_back(1, 0);
    }
  } else {
    std::map<std::pair<std::string, std::string>, std::map<Mode, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& m = runs[i].manifest;
      groups[{m.item_id, m.model_name}][m.mode].push_back(i);
    }
    for (auto& [key, by_mode] : groups) {
      auto& base = by_mode[Mode::kBaseline];
      auto& autoscore = by_mode[Mode::kAutoscore];
      if (base.size() == 1 && autoscore.size() == 1) pairs.emplace_back(base[0], autoscore[0]);
    }
  }
  for (auto [b, a] : pairs) CheckSameDataset(runs[b].manifest, runs[a].manifest);

  fs::create_directories(f.out);
  std::vector<MetricsReport> reports;
  std::set<std::string> used_names;
  for (const auto& run : runs) {
    reports.push_back(EvaluateRun(run, RunLabel(run.manifest), policy));
    const MetricsReport& report = reports.back();
    std::string name = SafeName(report.label);
    for (int k = 2; !used_names.insert(name).second; ++k) {
      name = SafeName(report.label) + "_" + std::to_string(k);
    }
    io::WriteFileAtomic(fs::path(f.out) / ("metrics_" + name + ".json"),
                        ToJson(report).dump(2) + "\n");
    out << RenderText(report) << "\n";
  }

  if (!pairs.empty()) {
    std::vector<ComparisonRow> rows;
    for (auto [b, a] : pairs) {
      rows.push_back(ComparisonRow{runs[b].manifest.item_id, runs[b].manifest.model_name,
                                   reports[b], reports[a]});
    }
    ComparisonTable table = BuildComparisonTable(rows);
    for (const auto& w : table.warnings) err << "warning: " << w << "\n";
    io::WriteFileAtomic(fs::path(f.out) / "comparison.md", table.markdown);
    io::WriteFileAtomic(fs::path(f.out) / "comparison.json", table.json.dump(2) + "\n");
    out << table.markdown;
  }
  return kExitOk;
}

ComponentSchema SchemaOfRun(const RunManifest& m) {
  const Json& items = m.config.contains("items") ? m.config["items"] : Json::object();
  if (!items.contains(m.item_id) || !items[m.item_id].contains("schema")) {
    throw Error(ErrorCode::kConfig, "run manifest holds no schema for item " + m.item_id);
  }
  return CompileSchema(m.item_id, items[m.item_id]["schema"]);
}

int CmdValidate(const ValidateFlags& f, std::ostream& out) {
  RunResult run = LoadRun(f.run);
  if (run.manifest.mode != Mode::kAutoscore) {
    throw Error(ErrorCode::kConfig, f.run + " is a baseline run; components exist only in "
                                            "autoscore runs");
  }
  const ComponentSchema schema = SchemaOfRun(run.manifest);
  std::vector<GoldAnnotation> gold = LoadGoldAnnotations(f.gold);

  std::map<std::string, StructuredRepresentation> predicted;
  if (f.sample_fraction) {
    std::vector<std::string> ids;
    for (const auto& r : run.records) ids.push_back(r.response_id);
    auto sampled = SampleIds(ids, *f.sample_fraction, f.seed);
    std::set<std::string> keep(sampled.begin(), sampled.end());
    for (const auto& r : run.records) {
      if (keep.contains(r.response_id)) predicted.emplace(r.response_id, *r.representation);
    }
    std::erase_if(gold, [&](const GoldAnnotation& g) { return !keep.contains(g.response_id); });
  } else {
    // Every annotated response that was scored; failed responses have no
    // components to compare.
    std::set<std::string> annotated;
    for (const auto& g : gold) annotated.insert(g.response_id);
    for (const auto& r : run.records) {
      if (annotated.contains(r.response_id)) predicted.emplace(r.response_id, *r.representation);
    }
    const auto before = gold.size();
    std::erase_if(gold, [&](const GoldAnnotation& g) { return !predicted.contains(g.response_id); });
    if (gold.size() < before) {
      spdlog::warn("{} annotated responses have no scored record and are skipped",
                   before - gold.size());
    }
  }

  ReliabilityReport report = ValidateComponents(predicted, gold, schema);
  if (f.out) io::WriteFileAtomic(*f.out, ToJson(report).dump(2) + "\n");
  out << RenderText(report);
  return kExitOk;
}

int CmdTradeoff(const TradeoffFlags& f, std::ostream& out) {
  std::vector<TradeoffInput> inputs;
  for (const auto& dir : f.runs) {
    RunResult run = LoadRun(dir);
    if (run.records.empty()) {
      spdlog::warn("{} has no scored responses; no tradeoff row", dir);
      continue;
    }
    MetricsReport metrics = EvaluateRun(run, RunLabel(run.manifest));
    inputs.push_back(TradeoffInput{std::move(run), std::move(metrics)});
  }
  const std::string csv = TradeoffCsv(TradeoffData(inputs));
  io::WriteFileAtomic(f.out, csv);
  out << csv;
  return kExitOk;
}

int CmdCase(const CaseFlags& f, std::ostream& out) {
  RunResult autoscore_run = LoadRun(f.run_autoscore);
  RunResult baseline_run = LoadRun(f.run_baseline);
  CaseRecord record = BuildCaseRecord(autoscore_run, baseline_run, f.id);
  const std::string markdown = RenderCaseMarkdown(record);
  fs::create_directories(f.out);
  io::WriteFileAtomic(fs::path(f.out) / ("case_" + SafeName(f.id) + ".md"), markdown);
  out << markdown;
  return kExitOk;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidRange:
    case ErrorCode::kInvalidSchema:
    case ErrorCode::kDuplicateField:
    case ErrorCode::kDanglingDerivation:
    case ErrorCode::kEmptySchema:
    case ErrorCode::kUnboundPlaceholder:
    case ErrorCode::kInvalidRequest:
      return kExitConfig;
    case ErrorCode::kMissingColumn:
    case ErrorCode::kMalformedRow:
    case ErrorCode::kEmptySelection:
    case ErrorCode::kManifestMismatch:
    case ErrorCode::kNotFound:
    case ErrorCode::kIo:
    case ErrorCode::kAlignmentError:
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kNoGold:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kInvalidValue:
    case ErrorCode::kOutOfRange:
      return kExitDataset;
    case ErrorCode::kTransport:
    case ErrorCode::kRateLimited:
      return kExitBackend;
    default:
      return kExitInternal;
  }
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app;
  Flags flags;
  Subcommands sub = BuildApp(app, flags);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  ConfigureLogging(flags.quiet);

  try {
    if (*sub.score) return CmdScore(flags.score, out);
    if (*sub.evaluate) return CmdEvaluate(flags.evaluate, out, err);
    if (*sub.validate) return CmdValidate(flags.validate, out);
    if (*sub.tradeoff) return CmdTradeoff(flags.tradeoff, out);
    if (*sub.case_study) return CmdCase(flags.case_study, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

std::string FullHelpText() {
  CLI::App app;
  Flags flags;
  Subcommands sub = BuildApp(app, flags);
  std::string text = app.help();
  for (CLI::App* s : {sub.score, sub.evaluate, sub.validate, sub.tradeoff, sub.case_study}) {
    text += "\n" + s->help();
  }
  return text;
}

}  // namespace autoscore
