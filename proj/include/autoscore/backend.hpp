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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "autoscore/json.hpp"

namespace autoscore {

struct ChatMessage {
  std::string role;  // "system" or "user"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::string model_name;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  bool force_json = false;

  /// Throws kInvalidRequest on an empty message list, an unknown role, a
  /// temperature outside [0, 2] or a non-positive token limit.
  void Validate() const;
};

struct ChatResponse {
  std::string text;
  std::int64_t latency_ms = 0;
  bool from_cache = false;
};

/// Lowercase hex SHA-256 over the sorted-key JSON serialization of every
/// request field. Message content is hashed verbatim.
std::string RequestDigest(const ChatRequest& request);

/// Lowercase hex SHA-256 of arbitrary bytes.
std::string Sha256Hex(std::string_view data);

/// Uniform chat-completion interface. Implementations must be safe to call
/// from many threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
  /// Stable description recorded in run manifests, e.g. "replay".
  virtual std::string Identity() const = 0;
};

// ---------------------------------------------------------------------------
// Remote (OpenAI-compatible) backend.

struct HttpResponse {
  /// 0 when no HTTP response was received (connection failure, timeout).
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse Post(const std::string& url, const std::string& body,
                            const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

/// cpp-httplib client. Supports https:// when built with OpenSSL.
class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(120))
      : timeout_(timeout) {}
  HttpResponse Post(const std::string& url, const std::string& body,
                    const std::vector<std::pair<std::string, std::string>>& headers) override;

 private:
  std::chrono::seconds timeout_;
};

/// Exponential backoff for 429, 5xx and connection failures. Other 4xx
/// responses are never retried.
struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;

  std::chrono::milliseconds DelayBefore(int attempt) const;  // attempt >= 1
  static bool IsRetryable(int status);
};

struct RemoteOptions {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  int parallelism = 4;  // max in-flight requests
  RetryPolicy retry;
};

class RemoteBackend : public ChatBackend {
 public:
  RemoteBackend(RemoteOptions options, std::shared_ptr<HttpTransport> transport);

  ChatResponse Complete(const ChatRequest& request) override;
  std::string Identity() const override { return "remote:" + options_.base_url; }

  /// JSON body sent to <base_url>/chat/completions.
  static Json BuildBody(const ChatRequest& request);
  /// Reads choices[0].message.content; throws kTransport on a malformed body.
  static std::string ParseContent(int status, const std::string& body);

 private:
  RemoteOptions options_;
  std::shared_ptr<HttpTransport> transport_;
  std::counting_semaphore<std::numeric_limits<int>::max()> in_flight_;
};

// ---------------------------------------------------------------------------
// Deterministic backends.

/// Serves responses from a fixture keyed by request digest. Fixture lines are
/// {"digest": hex, "text": string} with an optional "latency_ms". A missing
/// digest throws kReplayMiss; there is no network fallback.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(const std::filesystem::path& fixture,
                         std::int64_t default_latency_ms = 1);
  ReplayBackend(std::unordered_map<std::string, std::string> entries,
                std::int64_t default_latency_ms = 1);

  ChatResponse Complete(const ChatRequest& request) override;
  std::string Identity() const override { return "replay"; }
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string text;
    std::int64_t latency_ms;
  };
  std::unordered_map<std::string, Entry> entries_;
  std::int64_t default_latency_ms_;
};

struct ScriptedReply {
  std::string text;
  std::int64_t latency_ms = 1;
};

/// Answers through a caller-supplied function. The function must be a pure
/// function of the request for runs to be deterministic.
class ScriptedBackend : public ChatBackend {
 public:
  using Responder = std::function<ScriptedReply(const ChatRequest&)>;

  explicit ScriptedBackend(Responder responder, std::string name = "scripted")
      : responder_(std::move(responder)), name_(std::move(name)) {}

  /// Rule list: [{"when": [substring, ...], "respond": [text, ...],
  /// "latency_ms": n}]. The first rule whose substrings all occur in the
  /// request's messages answers; respond[k] is used on the k-th attempt
  /// (attempt = number of user messages - 1), the last entry repeating.
  /// No matching rule throws kReplayMiss.
  static std::shared_ptr<ScriptedBackend> FromRules(const Json& rules);
  static std::shared_ptr<ScriptedBackend> FromRulesFile(const std::filesystem::path& path);

  ChatResponse Complete(const ChatRequest& request) override;
  std::string Identity() const override { return name_; }

  /// Retry index of a request built by the agents (0 for the first attempt).
  static int AttemptIndex(const ChatRequest& request);

 private:
  Responder responder_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Decorators.

/// Response cache in front of another backend. Persists to an append-only
/// JSONL file (same layout as replay fixtures) when a path is given.
class CachingBackend : public ChatBackend {
 public:
  CachingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path path = {});

  ChatResponse Complete(const ChatRequest& request) override;
  std::string Identity() const override { return inner_->Identity(); }
  std::size_t size() const;

 private:
  struct Entry {
    std::string text;
    std::int64_t latency_ms;
  };
  std::shared_ptr<ChatBackend> inner_;
  std::filesystem::path path_;
  mutable std::shared_mutex index_mutex_;
  std::unordered_map<std::string, Entry> index_;
  std::mutex writer_mutex_;
};

class CountingBackend : public ChatBackend {
 public:
  explicit CountingBackend(std::shared_ptr<ChatBackend> inner) : inner_(std::move(inner)) {}

  ChatResponse Complete(const ChatRequest& request) override {
    ++calls_;
    return inner_->Complete(request);
  }
  std::string Identity() const override { return inner_->Identity(); }
  int calls() const { return calls_.load(); }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::atomic<int> calls_{0};
};

}  // namespace autoscore
