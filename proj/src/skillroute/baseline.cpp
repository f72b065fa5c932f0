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

#include "skillroute/baseline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <optional>
#include <thread>

#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"

namespace skillroute {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kTaskPlaceholder = "{{TASK}}";

constexpr std::string_view kTemplate =
    "You classify robot tasks by the physical skills a robot needs to carry them out.\n"
    "\n"
    "Skills are differentiating capabilities: capabilities that separate one robot class from "
    "another. Universal capabilities such as cameras, GPS or onboard compute are not skills.\n"
    "- fly: the robot must move through the air.\n"
    "- legs: the robot must walk, climb stairs or cross terrain that needs legged locomotion.\n"
    "- wheels: the robot must drive on wheels or tracks over roads, floors or paths.\n"
    "- hands: the robot must grasp, carry or manipulate objects.\n"
    "- under water: the robot must operate submerged below the water surface.\n"
    "- surface water: the robot must travel on the surface of water.\n"
    "A task may need any number of skills, including several at once.\n"
    "\n"
    "Task:\n"
    "{{TASK}}\n"
    "\n"
    "Answer with a single JSON object and nothing else: no prose, no explanation. The object must have "
    "exactly these six boolean fields:\n"
    "{\"fly\": <bool>, \"legs\": <bool>, \"wheels\": <bool>, \"hands\": <bool>, \"under_water\": <bool>, "
    "\"surface_water\": <bool>}\n";

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// End index (one past '}') of the balanced object starting at `open`, or npos.
std::size_t match_object(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// Lower-cases bare True/False/None (Python style) outside strings.
std::string normalize_literals(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < s.size()) {
        out += s[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      std::string word(s.substr(i, j - i));
      std::string lower = word;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
      out += (lower == "true" || lower == "false" || lower == "null") ? lower : word;
      i = j - 1;
      continue;
    }
    out += c;
  }
  return out;
}

std::optional<bool> as_boolean(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto n = v.get<long long>();
    if (n == 0 || n == 1) return n == 1;
    return std::nullopt;
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == 0.0 || d == 1.0) return d == 1.0;
    return std::nullopt;
  }
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (s == "true") return true;
    if (s == "false") return false;
  }
  return std::nullopt;
}

bool has_skill_key(const json& obj) {
  for (const auto& [k, v] : obj.items()) {
    if (parse_skill(k)) return true;
  }
  return false;
}

// A reply may wrap the fields as {"skills": {...}}.
const json* skill_object(const json& obj) {
  if (has_skill_key(obj)) return &obj;
  if (obj.contains("skills") && obj["skills"].is_object() && has_skill_key(obj["skills"])) return &obj["skills"];
  return nullptr;
}

SkillVector read_skill_object(const json& obj, const std::string& raw) {
  std::array<std::optional<bool>, kNumSkills> seen{};
  for (const auto& [k, v] : obj.items()) {
    const auto s = parse_skill(k);
    if (!s) continue;
    const auto b = as_boolean(v);
    if (!b) throw ParseError("non-boolean value for '" + std::string(skill_key(*s)) + "': " + v.dump(), raw);
    auto& slot = seen[index_of(*s)];
    if (slot && *slot != *b) throw ParseError("conflicting values for '" + std::string(skill_key(*s)) + "'", raw);
    slot = b;
  }
  SkillVector out;
  for (Skill s : kAllSkills) {
    const auto& slot = seen[index_of(s)];
    if (!slot) throw ParseError("missing key '" + std::string(skill_key(s)) + "'", raw);
    out.set(s, *slot);
  }
  return out;
}

}  // namespace

const std::string& prompt_template_hash() {
  static const std::string hash = sha256_hex(kTemplate);
  return hash;
}

std::string build_prompt(std::string_view text) {
  if (blank(text)) throw ArgumentError("task text must be non-empty");
  std::string out(kTemplate);
  out.replace(out.find(kTaskPlaceholder), kTaskPlaceholder.size(), text);
  return out;
}

SkillVector parse_skill_response(std::string_view raw) {
  const std::string raw_copy(raw);
  std::optional<SkillVector> first;
  std::size_t pos = 0;
  while ((pos = raw.find('{', pos)) != std::string_view::npos) {
    const auto end = match_object(raw, pos);
    if (end == std::string_view::npos) break;
    const json obj = json::parse(normalize_literals(raw.substr(pos, end - pos)), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      ++pos;  // not JSON; an inner brace may still open a valid object
      continue;
    }
    pos = end;
    const json* fields = skill_object(obj);
    if (!fields) continue;
    if (!first) {
      first = read_skill_object(*fields, raw_copy);
      continue;
    }
    // Later skill objects only matter when they are complete and disagree.
    try {
      if (read_skill_object(*fields, raw_copy) != *first) {
        throw ParseError("multiple conflicting skill objects", raw_copy);
      }
    } catch (const ParseError& e) {
      if (std::string_view(e.what()).starts_with("multiple")) throw;
    }
  }
  if (!first) throw ParseError("no structured object found in response", raw_copy);
  return *first;
}

void BaselineConfig::validate() const {
  provider.validate();
  if (template_id != kPromptTemplateId) throw ConfigError("unknown prompt template '" + template_id + "'");
  if (max_attempts < 1) throw ArgumentError("max_attempts must be >= 1");
  if (base_backoff_seconds < 0) throw ArgumentError("base_backoff_seconds must be >= 0");
  if (timeout_seconds <= 0) throw ArgumentError("timeout_seconds must be > 0");
  if (parallelism < 1) throw ArgumentError("parallelism must be >= 1");
}

BaselineConfig baseline_config_from_json(const json& j) {
  BaselineConfig c;
  if (j.contains("provider")) c.provider = provider_profile_from_json(j.at("provider"));
  c.template_id = j.value("template_id", c.template_id);
  c.max_attempts = j.value("max_attempts", c.provider.max_attempts);
  c.base_backoff_seconds = j.value("base_backoff_seconds", c.provider.base_backoff_seconds);
  c.timeout_seconds = j.value("timeout_seconds", c.provider.timeout_seconds);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.provider.timeout_seconds = c.timeout_seconds;
  c.validate();
  return c;
}

ordered_json to_json(const RawExchange& e) {
  ordered_json j;
  j["task_id"] = e.task_id;
  j["prompt"] = e.prompt;
  j["response"] = e.response;
  j["attempts"] = e.attempts;
  j["latency_seconds"] = e.latency_seconds;
  j["backoff_seconds"] = e.backoff_seconds;
  j["error"] = e.error.empty() ? ordered_json(nullptr) : ordered_json(e.error);
  return j;
}

RawExchange raw_exchange_from_json(const json& j) {
  RawExchange e;
  try {
    e.task_id = j.at("task_id").get<std::string>();
    e.prompt = j.at("prompt").get<std::string>();
    e.response = j.at("response").get<std::string>();
    e.attempts = j.at("attempts").get<int>();
    e.latency_seconds = j.at("latency_seconds").get<double>();
    e.backoff_seconds = j.at("backoff_seconds").get<double>();
    if (j.contains("error") && !j["error"].is_null()) e.error = j["error"].get<std::string>();
  } catch (const json::exception& ex) {
    throw ValidationError({std::string("malformed exchange: ") + ex.what()});
  }
  return e;
}

std::string serialize_exchanges(std::span<const RawExchange> exchanges) {
  std::string out;
  for (const auto& e : exchanges) out += to_json(e).dump() + "\n";
  return out;
}

void write_exchanges(std::span<const RawExchange> exchanges, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_exchanges(exchanges));
}

std::vector<RawExchange> parse_exchanges(std::string_view contents) {
  std::vector<RawExchange> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    const auto line = contents.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (blank(line)) {
      if (end == contents.size()) break;
      continue;
    }
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ValidationError({"line " + std::to_string(line_no) + ": not valid JSON"});
    out.push_back(raw_exchange_from_json(j));
    if (end == contents.size()) break;
  }
  return out;
}

std::vector<RawExchange> read_exchanges(const std::filesystem::path& path) { return parse_exchanges(read_file(path)); }

ordered_json run_summary_json(const BaselineRun& run) {
  ordered_json j;
  j["provider"] = run.provider;
  j["template_id"] = run.template_id;
  j["template_sha256"] = run.template_hash;
  j["n"] = run.predictions.size();
  j["parse_errors"] = run.parse_errors;
  j["transport_failures"] = run.transport_failures;
  j["metrics"] = to_json(run.report);
  return j;
}

BaselineRun run_baseline(const BaselineConfig& config, std::span<const TaskRecord> records, ChatProvider& provider,
                         const Sleeper& sleep) {
  config.validate();
  if (records.empty()) throw ArgumentError("baseline needs at least one record");

  BaselineRun run;
  run.provider = provider.name();
  run.template_id = config.template_id;
  run.template_hash = prompt_template_hash();
  run.exchanges.resize(records.size());
  run.predictions.resize(records.size());
  std::vector<char> parse_failed(records.size(), 0);
  std::vector<char> transport_failed(records.size(), 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < records.size(); i = next.fetch_add(1)) {
      const auto& r = records[i];
      RawExchange& ex = run.exchanges[i];
      ex.task_id = r.id;
      ex.prompt = build_prompt(r.text);
      ChatRequest req{"", ex.prompt, config.provider.temperature, config.provider.max_output_tokens};
      SkillVector predicted;
      try {
        const auto result = call_with_retry(provider, req, config.max_attempts, config.base_backoff_seconds, sleep);
        ex.response = result.content;
        ex.attempts = result.attempts;
        ex.latency_seconds = result.latency_seconds;
        ex.backoff_seconds = result.backoff_seconds;
        try {
          predicted = parse_skill_response(ex.response);
        } catch (const ParseError&) {
          parse_failed[i] = 1;
        }
      } catch (const TransportError& e) {
        ex.attempts = e.attempts();
        ex.error = std::string("transport: ") + e.what();
        transport_failed[i] = 1;
      }
      run.predictions[i] = PredictionRecord{r, predicted, {}};
      for (std::size_t s = 0; s < kNumSkills; ++s) run.predictions[i].probabilities[s] = predicted.test(s) ? 1.0 : 0.0;
    }
  };

  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), records.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  run.parse_errors = static_cast<std::size_t>(std::count(parse_failed.begin(), parse_failed.end(), 1));
  run.transport_failures = static_cast<std::size_t>(std::count(transport_failed.begin(), transport_failed.end(), 1));
  std::vector<SkillVector> truths, preds;
  for (const auto& p : run.predictions) {
    truths.push_back(p.record.skills);
    preds.push_back(p.predicted);
  }
  run.report = evaluate(truths, preds);
  return run;
}

std::vector<SkillVector> rescore_exchanges(std::span<const RawExchange> exchanges) {
  std::vector<SkillVector> out;
  out.reserve(exchanges.size());
  for (const auto& e : exchanges) {
    if (!e.error.empty()) {
      out.emplace_back();
      continue;
    }
    try {
      out.push_back(parse_skill_response(e.response));
    } catch (const ParseError&) {
      out.emplace_back();
    }
  }
  return out;
}

}  // namespace skillroute
