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

// Zero-shot LLM baseline: one fixed prompt per task, a tolerant parser for
// the structured reply, and scoring through the shared metrics.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skillroute/dataset.hpp"
#include "skillroute/metrics.hpp"
#include "skillroute/provider.hpp"

namespace skillroute {

inline constexpr const char* kPromptTemplateId = "zero-shot-v1";

/// sha256 of the template text with the task placeholder unexpanded.
const std::string& prompt_template_hash();

/// Throws ArgumentError for empty or whitespace-only text.
std::string build_prompt(std::string_view text);

/// Finds the first JSON object in `raw` (code fences and surrounding prose are
/// tolerated) and reads six boolean skill fields from it. Accepts true/false
/// in any case, as literals or strings, and the integers 0/1. Throws
/// ParseError carrying `raw` when no object is found, a key is missing, a
/// value is not boolean, or several skill objects disagree.
SkillVector parse_skill_response(std::string_view raw);

struct BaselineConfig {
  ProviderProfile provider;
  std::string template_id = kPromptTemplateId;
  int max_attempts = 4;
  double base_backoff_seconds = 1.0;
  double timeout_seconds = 60.0;
  int parallelism = 2;

  void validate() const;
};

BaselineConfig baseline_config_from_json(const nlohmann::json& j);

struct RawExchange {
  std::string task_id;
  std::string prompt;
  std::string response;
  int attempts = 0;
  double latency_seconds = 0.0;  // excludes backoff
  double backoff_seconds = 0.0;
  std::string error;  // empty, or "transport: ..." when every attempt failed
};

nlohmann::ordered_json to_json(const RawExchange& e);
RawExchange raw_exchange_from_json(const nlohmann::json& j);
std::string serialize_exchanges(std::span<const RawExchange> exchanges);
void write_exchanges(std::span<const RawExchange> exchanges, const std::filesystem::path& path);
std::vector<RawExchange> parse_exchanges(std::string_view contents);
std::vector<RawExchange> read_exchanges(const std::filesystem::path& path);

struct BaselineRun {
  std::string provider;
  std::string template_id;
  std::string template_hash;
  std::vector<PredictionRecord> predictions;
  std::vector<RawExchange> exchanges;
  MetricsReport report;
  std::size_t parse_errors = 0;
  std::size_t transport_failures = 0;
};

nlohmann::ordered_json run_summary_json(const BaselineRun& run);

/// One call per record. Parse failures and exhausted retries both score as
/// an all-zero prediction and are counted separately.
BaselineRun run_baseline(const BaselineConfig& config, std::span<const TaskRecord> records, ChatProvider& provider,
                         const Sleeper& sleep = real_sleeper());

/// Replays logged responses through the parser. Failed exchanges and
/// unparseable replies yield the all-zero vector.
std::vector<SkillVector> rescore_exchanges(std::span<const RawExchange> exchanges);

}  // namespace skillroute
