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

#include "skillroute/provider.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

#include "httplib.h"
#include "skillroute/dataset.hpp"
#include "skillroute/error.hpp"
#include "skillroute/fixtures.hpp"
#include "skillroute/hashing.hpp"

namespace skillroute {

void ProviderProfile::validate() const {
  if (name.empty()) throw ArgumentError("provider name must be non-empty");
  if (max_attempts < 1) throw ArgumentError("max_attempts must be >= 1");
  if (base_backoff_seconds < 0) throw ArgumentError("base_backoff_seconds must be >= 0");
  if (timeout_seconds <= 0) throw ArgumentError("timeout_seconds must be > 0");
}

ProviderProfile provider_profile_from_json(const nlohmann::json& j) {
  ProviderProfile p;
  p.name = j.value("name", p.name);
  p.model = j.value("model", p.model);
  p.api_base = j.value("api_base", p.api_base);
  p.temperature = j.value("temperature", p.temperature);
  p.max_output_tokens = j.value("max_output_tokens", p.max_output_tokens);
  p.max_attempts = j.value("max_attempts", p.max_attempts);
  p.base_backoff_seconds = j.value("base_backoff_seconds", p.base_backoff_seconds);
  p.timeout_seconds = j.value("timeout_seconds", p.timeout_seconds);
  if (j.contains("api_key")) throw ConfigError("api keys are read from " + std::string(kApiKeyEnv) + ", not config files");
  p.validate();
  return p;
}

nlohmann::json to_json(const ProviderProfile& p) {
  return {{"name", p.name},
          {"model", p.model},
          {"api_base", p.api_base},
          {"temperature", p.temperature},
          {"max_output_tokens", p.max_output_tokens},
          {"max_attempts", p.max_attempts},
          {"base_backoff_seconds", p.base_backoff_seconds},
          {"timeout_seconds", p.timeout_seconds}};
}

Sleeper real_sleeper() {
  return [](double s) {
    if (s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(s));
  };
}

CallResult call_with_retry(ChatProvider& provider, const ChatRequest& request, int max_attempts,
                           double base_backoff_seconds, const Sleeper& sleep) {
  if (max_attempts < 1) throw ArgumentError("max_attempts must be >= 1");
  using clock = std::chrono::steady_clock;
  CallResult result;
  const auto start = clock::now();
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    result.attempts = attempt;
    try {
      result.content = provider.complete(request);
      const std::chrono::duration<double> wall = clock::now() - start;
      result.latency_seconds = std::max(0.0, wall.count() - result.backoff_seconds);
      return result;
    } catch (const CallFailure& f) {
      last_error = f.what();
      if (!f.retryable()) {
        throw TransportError(provider.name() + ": " + last_error + " (attempt " + std::to_string(attempt) + ")",
                             attempt);
      }
      if (attempt == max_attempts) break;
      double wait = base_backoff_seconds * std::ldexp(1.0, attempt - 1);
      if (f.retry_after()) wait = std::max(wait, *f.retry_after());
      const auto before = clock::now();
      sleep(wait);
      // Injected sleepers may not block; count the larger of slept and requested.
      const std::chrono::duration<double> slept = clock::now() - before;
      result.backoff_seconds += std::max(wait, slept.count());
    }
  }
  throw TransportError(provider.name() + ": giving up after " + std::to_string(max_attempts) +
                           " attempts: " + last_error,
                       max_attempts);
}

std::unique_ptr<CannedProvider> CannedProvider::scripted(std::string name, std::vector<std::string> responses) {
  if (responses.empty()) throw ArgumentError("scripted provider needs at least one response");
  return std::make_unique<CannedProvider>(
      std::move(name), [r = std::move(responses)](const ChatRequest&, std::size_t i) { return r[i % r.size()]; });
}

std::string CannedProvider::complete(const ChatRequest& request) {
  const auto i = calls_.fetch_add(1);
  return responder_(request, i);
}

namespace {

std::optional<long> find_int(const std::string& text, const std::regex& re) {
  std::smatch m;
  if (std::regex_search(text, m, re)) return std::stol(m[1].str());
  return std::nullopt;
}

}  // namespace

std::string FixtureChatProvider::complete(const ChatRequest& request) {
  static const std::regex count_re(R"(Task count:\s*(\d+))");
  static const std::regex required_re(R"(Required skills:\s*([a-z_, ]+))");

  const long count = find_int(request.user, count_re).value_or(5);
  std::optional<SkillVector> required;
  std::smatch m;
  if (std::regex_search(request.user, m, required_re)) {
    std::vector<std::string> names;
    std::string list = m[1].str();
    std::size_t pos = 0;
    while (pos <= list.size()) {
      auto comma = list.find(',', pos);
      auto item = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      auto b = item.find_first_not_of(' ');
      auto e = item.find_last_not_of(' ');
      if (b != std::string::npos) names.push_back(item.substr(b, e - b + 1));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    required = skill_vector_from_names(std::span<const std::string>(names));
  }

  Rng rng(seed_ ^ fnv1a64(request.user));
  const auto& combos = fixtures::fixture_combinations();
  std::string out;
  for (long i = 0; i < count; ++i) {
    if (malformed_every_ > 0 && (i + 1) % malformed_every_ == 0) {
      out += "Here is another task: inspect the tank (skills: hands)\n";
      continue;
    }
    const SkillVector skills = required ? *required : combos[rng.below(combos.size())];
    TaskRecord r{"pending", fixtures::task_text(skills, rng), skills, fixtures::domain_for(skills), name_,
                 Split::kUnassigned};
    out += to_line(r);
    out.push_back('\n');
  }
  return out;
}

HttpChatProvider::HttpChatProvider(ProviderProfile profile) : profile_(std::move(profile)) {
  profile_.validate();
  std::string base = profile_.api_base;
  if (base.empty()) {
    if (const char* env = std::getenv(kApiBaseEnv)) base = env;
  }
  if (base.empty()) throw ConfigError(std::string("no API base configured; set ") + kApiBaseEnv);
  if (const char* key = std::getenv(kApiKeyEnv)) api_key_ = key;

  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base, m, url_re)) throw ConfigError("malformed API base URL '" + base + "'");
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string HttpChatProvider::complete(const ChatRequest& request) {
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration<double>(profile_.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  if (!api_key_.empty()) client.set_bearer_token_auth(api_key_);

  nlohmann::json body = {
      {"model", profile_.model},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", request.system}},
                              {{"role", "user"}, {"content", request.user}}})},
  };
  auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(), "application/json");
  if (!res) throw CallFailure("connection failed: " + httplib::to_string(res.error()), true);

  if (res->status == 429 || res->status >= 500) {
    std::optional<double> retry_after;
    if (res->has_header("Retry-After")) {
      try {
        retry_after = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    throw CallFailure("HTTP " + std::to_string(res->status), true, retry_after);
  }
  if (res->status != 200) {
    throw CallFailure("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200), false);
  }
  auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) throw CallFailure("response body is not JSON", false);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw CallFailure("response has no choices[0].message.content", false);
  }
}

std::unique_ptr<ChatProvider> make_provider(const ProviderProfile& profile, const std::string& kind) {
  if (kind == "fixture" || kind.rfind("fixture:", 0) == 0) {
    std::uint64_t seed = 0;
    if (kind.size() > 8) seed = std::stoull(kind.substr(8));
    return std::make_unique<FixtureChatProvider>(profile.name, seed);
  }
  if (kind == "http" || kind.empty()) return std::make_unique<HttpChatProvider>(profile);
  throw ArgumentError("unknown provider kind '" + kind + "' (expected http or fixture[:seed])");
}

}  // namespace skillroute
