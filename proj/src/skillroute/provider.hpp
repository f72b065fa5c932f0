// Copyright 2026 The SkillRoute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace skillroute {

inline constexpr const char* kApiKeyEnv = "SKILLROUTE_LLM_API_KEY";
inline constexpr const char* kApiBaseEnv = "SKILLROUTE_LLM_API_BASE";

struct ProviderProfile {
  std::string name = "provider";
  std::string model;
  /// Empty means "read SKILLROUTE_LLM_API_BASE". Keys only ever come from the environment.
  std::string api_base;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  int max_attempts = 4;
  double base_backoff_seconds = 1.0;
  double timeout_seconds = 60.0;

  void validate() const;
};

ProviderProfile provider_profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProviderProfile& p);

struct ChatRequest {
  std::string system;
  std::string user;
  double temperature = 0.0;
  int max_output_tokens = 4096;
};

/// Thrown by providers for a failed call. Retryable failures (connection
/// errors, 429, 5xx) are retried by call_with_retry; others surface at once.
class CallFailure : public std::runtime_error {
 public:
  CallFailure(const std::string& what, bool retryable, std::optional<double> retry_after = std::nullopt)
      : std::runtime_error(what), retryable_(retryable), retry_after_(retry_after) {}
  bool retryable() const noexcept { return retryable_; }
  std::optional<double> retry_after() const noexcept { return retry_after_; }

 private:
  bool retryable_;
  std::optional<double> retry_after_;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  /// Returns the assistant message text. Must be safe to call concurrently.
  virtual std::string complete(const ChatRequest& request) = 0;
};

using Sleeper = std::function<void(double seconds)>;
Sleeper real_sleeper();

struct CallResult {
  std::string content;
  int attempts = 0;
  double latency_seconds = 0.0;  // wall time minus backoff waits
  double backoff_seconds = 0.0;
};

/// Exponential backoff: base * 2^(attempt-1), or the provider's retry-after
/// hint when larger. Throws TransportError carrying the attempt count.
CallResult call_with_retry(ChatProvider& provider, const ChatRequest& request, int max_attempts,
                           double base_backoff_seconds, const Sleeper& sleep);

/// Deterministic test double driven by a callback.
class CannedProvider : public ChatProvider {
 public:
  using Responder = std::function<std::string(const ChatRequest&, std::size_t call_index)>;

  CannedProvider(std::string name, Responder responder)
      : name_(std::move(name)), responder_(std::move(responder)) {}

  /// Cycles through `responses` in call order.
  static std::unique_ptr<CannedProvider> scripted(std::string name, std::vector<std::string> responses);

  std::string name() const override { return name_; }
  std::string complete(const ChatRequest& request) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::string name_;
  Responder responder_;
  std::atomic<std::size_t> calls_{0};
};

/// Offline generator that answers generation and boundary prompts with
/// fixture-style task lines. The reply is a pure function of the prompt and
/// seed. When `malformed_every` > 0 every k-th line is garbage.
class FixtureChatProvider : public ChatProvider {
 public:
  explicit FixtureChatProvider(std::string name, std::uint64_t seed = 0, int malformed_every = 0)
      : name_(std::move(name)), seed_(seed), malformed_every_(malformed_every) {}

  std::string name() const override { return name_; }
  std::string complete(const ChatRequest& request) override;

 private:
  std::string name_;
  std::uint64_t seed_;
  int malformed_every_;
};

/// OpenAI-compatible chat-completions client (POST {base}/chat/completions).
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderProfile profile);

  std::string name() const override { return profile_.name; }
  std::string complete(const ChatRequest& request) override;

 private:
  ProviderProfile profile_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::string api_key_;
};

/// "fixture" and "fixture:<seed>" build a FixtureChatProvider, anything else
/// an HttpChatProvider.
std::unique_ptr<ChatProvider> make_provider(const ProviderProfile& profile, const std::string& kind);

}  // namespace skillroute
