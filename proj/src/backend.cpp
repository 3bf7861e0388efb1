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

#include "autoscore/backend.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "autoscore/error.hpp"
#include "autoscore/io.hpp"

namespace autoscore {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ElapsedMs(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

std::string Truncate(const std::string& s, std::size_t n) {
  return s.size() <= n ? s : s.substr(0, n) + "...";
}

}  // namespace

void ChatRequest::Validate() const {
  if (messages.empty()) throw Error(ErrorCode::kInvalidRequest, "no messages");
  for (const auto& m : messages) {
    if (m.role != "system" && m.role != "user") {
      throw Error(ErrorCode::kInvalidRequest, "unsupported role '" + m.role + "'");
    }
  }
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::kInvalidRequest, "temperature outside [0, 2]");
  }
  if (max_output_tokens <= 0) {
    throw Error(ErrorCode::kInvalidRequest, "max_output_tokens must be positive");
  }
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidRequest, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string RequestDigest(const ChatRequest& request) {
  // nlohmann::json (not ordered_json) sorts object keys on dump.
  nlohmann::json canonical;
  canonical["model_name"] = request.model_name;
  canonical["temperature"] = request.temperature;
  canonical["max_output_tokens"] = request.max_output_tokens;
  canonical["force_json"] = request.force_json;
  auto& messages = canonical["messages"] = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return Sha256Hex(canonical.dump());
}

// ---------------------------------------------------------------------------

HttpResponse HttplibTransport::Post(
    const std::string& url, const std::string& body,
    const std::vector<std::pair<std::string, std::string>>& headers) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto result = client.Post(path, h, body, "application/json");
  if (!result) return HttpResponse{0, httplib::to_string(result.error())};
  return HttpResponse{result->status, result->body};
}

std::chrono::milliseconds RetryPolicy::DelayBefore(int attempt) const {
  double ms = static_cast<double>(base_delay.count()) * std::pow(factor, attempt - 1);
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

bool RetryPolicy::IsRetryable(int status) {
  return status == 0 || status == 429 || status >= 500;
}

RemoteBackend::RemoteBackend(RemoteOptions options, std::shared_ptr<HttpTransport> transport)
    : options_(std::move(options)),
      transport_(std::move(transport)),
      in_flight_(std::max(1, options_.parallelism)) {
  while (!options_.base_url.empty() && options_.base_url.back() == '/') {
    options_.base_url.pop_back();
  }
  if (!options_.retry.sleep) {
    options_.retry.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

Json RemoteBackend::BuildBody(const ChatRequest& request) {
  Json body = Json::object();
  body["model"] = request.model_name;
  Json messages = Json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;
  if (request.force_json) body["response_format"] = {{"type", "json_object"}};
  return body;
}

std::string RemoteBackend::ParseContent(int status, const std::string& body) {
  Json parsed = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_object() && parsed.contains("choices") && parsed["choices"].is_array() &&
      !parsed["choices"].empty()) {
    const Json& choice = parsed["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
  }
  throw Error(ErrorCode::kTransport,
              std::to_string(status) + " malformed completion body: " + Truncate(body, 200));
}

ChatResponse RemoteBackend::Complete(const ChatRequest& request) {
  request.Validate();
  const std::string url = options_.base_url + "/chat/completions";
  const std::string body = BuildBody(request).dump();
  std::vector<std::pair<std::string, std::string>> headers;
  if (!options_.api_key.empty()) {
    headers.emplace_back("Authorization", "Bearer " + options_.api_key);
  }

  std::int64_t latency = 0;
  HttpResponse last;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = options_.retry.DelayBefore(attempt - 1);
      spdlog::warn("HTTP {} from {}; retrying in {} ms (attempt {}/{})", last.status, url,
                   delay.count(), attempt, options_.retry.max_attempts);
      options_.retry.sleep(delay);
    }
    in_flight_.acquire();
    auto start = Clock::now();
    try {
      last = transport_->Post(url, body, headers);
    } catch (...) {
      in_flight_.release();
      throw;
    }
    latency += ElapsedMs(start);
    in_flight_.release();

    if (last.status >= 200 && last.status < 300) {
      return ChatResponse{ParseContent(last.status, last.body), std::max<std::int64_t>(latency, 1),
                          false};
    }
    if (!RetryPolicy::IsRetryable(last.status)) break;
  }
  auto code = last.status == 429 ? ErrorCode::kRateLimited : ErrorCode::kTransport;
  throw Error(code, std::to_string(last.status) + " " + Truncate(last.body, 200));
}

// ---------------------------------------------------------------------------

ReplayBackend::ReplayBackend(const std::filesystem::path& fixture,
                             std::int64_t default_latency_ms)
    : default_latency_ms_(default_latency_ms) {
  for (const auto& line : io::ReadJsonLines(fixture)) {
    if (!line.contains("digest") || !line.contains("text")) {
      throw Error(ErrorCode::kIo, fixture.string() + ": fixture lines need digest and text");
    }
    std::int64_t latency = line.value("latency_ms", std::int64_t{0});
    entries_[line["digest"].get<std::string>()] =
        Entry{line["text"].get<std::string>(), latency > 0 ? latency : default_latency_ms_};
  }
}

ReplayBackend::ReplayBackend(std::unordered_map<std::string, std::string> entries,
                             std::int64_t default_latency_ms)
    : default_latency_ms_(default_latency_ms) {
  for (auto& [digest, text] : entries) {
    entries_[digest] = Entry{std::move(text), default_latency_ms_};
  }
}

ChatResponse ReplayBackend::Complete(const ChatRequest& request) {
  request.Validate();
  std::string digest = RequestDigest(request);
  auto it = entries_.find(digest);
  if (it == entries_.end()) throw Error(ErrorCode::kReplayMiss, digest);
  return ChatResponse{it->second.text, it->second.latency_ms, false};
}

// ---------------------------------------------------------------------------

int ScriptedBackend::AttemptIndex(const ChatRequest& request) {
  int users = 0;
  for (const auto& m : request.messages) users += m.role == "user";
  return std::max(0, users - 1);
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::FromRules(const Json& rules) {
  if (!rules.is_array()) throw Error(ErrorCode::kConfig, "scripted rules must be a JSON array");
  struct Rule {
    std::vector<std::string> when;
    std::vector<std::string> respond;
    std::int64_t latency_ms;
  };
  std::vector<Rule> parsed;
  for (const auto& r : rules) {
    Rule rule;
    rule.when = r.value("when", std::vector<std::string>{});
    rule.respond = r.at("respond").get<std::vector<std::string>>();
    rule.latency_ms = r.value("latency_ms", std::int64_t{1});
    if (rule.respond.empty()) throw Error(ErrorCode::kConfig, "scripted rule without responses");
    parsed.push_back(std::move(rule));
  }
  auto responder = [rules = std::move(parsed)](const ChatRequest& request) {
    std::string haystack;
    for (const auto& m : request.messages) haystack += m.content + "\n";
    for (const auto& rule : rules) {
      bool match = std::all_of(rule.when.begin(), rule.when.end(), [&](const std::string& s) {
        return haystack.find(s) != std::string::npos;
      });
      if (!match) continue;
      auto k = std::min<std::size_t>(AttemptIndex(request), rule.respond.size() - 1);
      return ScriptedReply{rule.respond[k], rule.latency_ms};
    }
    throw Error(ErrorCode::kReplayMiss, "no scripted rule matches request " + RequestDigest(request));
  };
  return std::make_shared<ScriptedBackend>(std::move(responder));
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::FromRulesFile(const std::filesystem::path& path) {
  Json rules = Json::parse(io::ReadFile(path), nullptr, /*allow_exceptions=*/false);
  if (rules.is_discarded()) throw Error(ErrorCode::kConfig, path.string() + ": invalid JSON");
  return FromRules(rules);
}

ChatResponse ScriptedBackend::Complete(const ChatRequest& request) {
  request.Validate();
  ScriptedReply reply = responder_(request);
  return ChatResponse{std::move(reply.text), reply.latency_ms, false};
}

// ---------------------------------------------------------------------------

CachingBackend::CachingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path path)
    : inner_(std::move(inner)), path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  for (const auto& line : io::ReadJsonLines(path_)) {
    index_[line.at("digest").get<std::string>()] =
        Entry{line.at("text").get<std::string>(), line.value("latency_ms", std::int64_t{0})};
  }
  spdlog::debug("loaded {} cached responses from {}", index_.size(), path_.string());
}

std::size_t CachingBackend::size() const {
  std::shared_lock lock(index_mutex_);
  return index_.size();
}

ChatResponse CachingBackend::Complete(const ChatRequest& request) {
  std::string digest = RequestDigest(request);
  {
    std::shared_lock lock(index_mutex_);
    if (auto it = index_.find(digest); it != index_.end()) {
      return ChatResponse{it->second.text, 0, true};
    }
  }
  ChatResponse response = inner_->Complete(request);
  {
    std::scoped_lock lock(writer_mutex_);
    if (!path_.empty()) {
      Json line = {{"digest", digest}, {"text", response.text}, {"latency_ms", response.latency_ms}};
      io::LineAppender(path_).Append(line.dump());
    }
    std::unique_lock index_lock(index_mutex_);
    index_.emplace(digest, Entry{response.text, response.latency_ms});
  }
  return response;
}

}  // namespace autoscore
