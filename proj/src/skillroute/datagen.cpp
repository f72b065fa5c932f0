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

#include "skillroute/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"
#include "skillroute/rng.hpp"

namespace skillroute {

using nlohmann::json;
using nlohmann::ordered_json;

void GenerationBatchSpec::validate() const {
  if (count < 1) throw ArgumentError("batch '" + batch_name + "': count must be >= 1");
  if (chunk_size < 1) throw ArgumentError("chunk_size must be >= 1");
  for (const auto& d : domains) {
    if (!is_known_domain(d)) throw ArgumentError("unknown domain '" + d + "'");
  }
  provider.validate();
}

ordered_json to_json(const BatchReport& r) {
  ordered_json j;
  j["name"] = r.name;
  j["provider"] = r.provider;
  j["requested"] = r.requested;
  j["parsed"] = r.parsed;
  j["dropped"] = r.dropped;
  j["deduped"] = r.deduped;
  j["calls"] = r.calls;
  return j;
}

std::string generation_system_prompt() {
  std::string p =
      "You write realistic task descriptions for a heterogeneous robot fleet and label each task with the "
      "physical skills a robot needs to carry it out.\n"
      "Skills are differentiating physical capabilities, the ones that separate one robot class from "
      "another. Universal capabilities such as cameras, GPS or onboard compute are not skills.\n"
      "The six skills are:\n"
      "- fly: airborne flight\n"
      "- legs: legged locomotion (stairs, rubble, rough terrain)\n"
      "- wheels: wheeled locomotion (flat ground, speed, payload)\n"
      "- hands: grasping or manipulating objects\n"
      "- under_water: operating submerged\n"
      "- surface_water: operating on the surface of water\n"
      "A task may need one skill, several skills together, and every task needs at least one.\n"
      "Output format: one JSON object per line and nothing else (no prose, no numbering, no code fences). "
      "Each line must look exactly like:\n";
  TaskRecord example{"pending", "Inspect the underside of the bridge for cracks",
                     skill_vector_from_names({"fly"}), "urban infrastructure", "provider", Split::kUnassigned};
  p += to_line(example);
  p += "\nUse a boolean for every one of the six skills. Leave \"id\" as \"pending\" and \"split\" as null.\n";
  return p;
}

std::string generation_user_prompt(const GenerationBatchSpec& spec, std::size_t chunk_index,
                                   std::size_t chunk_count) {
  const std::size_t remaining = spec.count - chunk_index * spec.chunk_size;
  const std::size_t n = std::min(spec.chunk_size, remaining);
  std::ostringstream os;
  os << "Task count: " << n << "\n";
  os << "Part " << (chunk_index + 1) << " of " << chunk_count << " for batch " << spec.batch_name << ".\n";
  os << "Domains (spread tasks across them, use the exact tag in \"domain\"): ";
  const auto& domains = spec.domains.empty() ? known_domains() : spec.domains;
  bool first = true;
  for (const auto& d : domains) {
    if (d == "other" && spec.domains.empty()) continue;
    os << (first ? "" : "; ") << d;
    first = false;
  }
  os << "\n";
  if (!spec.context.empty()) {
    os << "Previously generated tasks with their labels. Do not repeat them; write new, different tasks:\n";
    for (const auto& r : spec.context) os << to_line(r) << "\n";
  }
  os << "Write exactly " << n << " new tasks, one JSON object per line.\n";
  return os.str();
}

std::vector<TaskRecord> context_excerpt(std::span<const TaskRecord> prior, std::uint64_t seed,
                                        std::size_t max_examples) {
  if (prior.size() <= max_examples) return {prior.begin(), prior.end()};
  std::vector<std::size_t> idx(prior.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(idx));
  idx.resize(max_examples);
  std::sort(idx.begin(), idx.end());
  std::vector<TaskRecord> out;
  out.reserve(max_examples);
  for (auto i : idx) out.push_back(prior[i]);
  return out;
}

namespace {

struct ChunkOutcome {
  std::string content;
  std::exception_ptr error;
};

/// Runs the requests with at most `parallelism` in flight; results keep
/// request order.
std::vector<ChunkOutcome> run_requests(ChatProvider& provider, const std::vector<ChatRequest>& requests,
                                       const ProviderProfile& profile, const GenerateOptions& options) {
  std::vector<ChunkOutcome> out(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < requests.size(); i = next.fetch_add(1)) {
      try {
        out[i].content = call_with_retry(provider, requests[i], profile.max_attempts,
                                         profile.base_backoff_seconds, options.sleep)
                             .content;
      } catch (...) {
        out[i].error = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, options.parallelism));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < std::min(n_threads, requests.size()); ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& o : out) {
    if (o.error) std::rethrow_exception(o.error);
  }
  return out;
}

bool is_fence_or_blank(std::string_view line) {
  auto b = line.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return true;
  return line.substr(b, 3) == "```";
}

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = std::string_view(text).substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    if (!is_fence_or_blank(line)) fn(line);
  }
}

std::string make_id(const std::string& prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-%06zu", n);
  return prefix + buf;
}

}  // namespace

GenerationResult generate_tasks(const GenerationBatchSpec& spec, ChatProvider& provider,
                                const GenerateOptions& options) {
  spec.validate();
  const std::size_t chunks = (spec.count + spec.chunk_size - 1) / spec.chunk_size;
  std::vector<ChatRequest> requests;
  const auto system = generation_system_prompt();
  for (std::size_t c = 0; c < chunks; ++c) {
    requests.push_back(ChatRequest{system, generation_user_prompt(spec, c, chunks), spec.provider.temperature,
                                   spec.provider.max_output_tokens});
  }
  const auto replies = run_requests(provider, requests, spec.provider, options);

  GenerationResult result;
  result.report.name = spec.batch_name;
  result.report.provider = spec.provider.name;
  result.report.requested = spec.count;
  result.report.calls = requests.size();
  std::string raw_sample;
  for (const auto& reply : replies) {
    if (raw_sample.size() < 500) raw_sample += reply.content.substr(0, 500 - raw_sample.size());
    for_each_line(reply.content, [&](std::string_view line) {
      if (result.records.size() >= spec.count) return;
      json raw = json::parse(line, nullptr, false);
      if (!raw.is_object()) {
        ++result.report.dropped;
        return;
      }
      raw["id"] = make_id(spec.batch_name, result.records.size() + 1);
      raw["source"] = spec.provider.name;
      raw["split"] = nullptr;
      auto v = validate_task_record(raw);
      if (!v.ok()) {
        ++result.report.dropped;
        return;
      }
      result.records.push_back(std::move(*v.record));
    });
  }
  result.report.parsed = result.records.size();
  if (result.records.empty()) {
    throw GenerationFailedError("batch '" + spec.batch_name + "': no parseable records from " + spec.provider.name,
                                raw_sample);
  }
  return result;
}

void BoundarySpec::validate() const {
  if (a == b) throw ArgumentError("boundary pair needs two distinct skills");
  if (a_only + b_only + both == 0) throw ArgumentError("boundary spec needs at least one non-zero arm count");
}

BoundarySpec BoundarySpec::with_default_cues() const {
  BoundarySpec s = *this;
  const bool legs_wheels = (a == Skill::kLegs && b == Skill::kWheels) || (a == Skill::kWheels && b == Skill::kLegs);
  auto fill = [](std::string& dst, std::string v) {
    if (dst.empty()) dst = std::move(v);
  };
  if (legs_wheels) {
    const std::string legs = "rough terrain, stairs or rubble, with no need for speed";
    const std::string wheels = "flat ground where speed or payload matters";
    fill(s.cue_a, a == Skill::kLegs ? legs : wheels);
    fill(s.cue_b, b == Skill::kLegs ? legs : wheels);
    fill(s.cue_both, "mixed-terrain missions that transition between rough and flat surfaces");
  } else {
    const std::string ka(skill_key(a)), kb(skill_key(b));
    fill(s.cue_a, "situations that clearly need " + ka + " and clearly do not need " + kb);
    fill(s.cue_b, "situations that clearly need " + kb + " and clearly do not need " + ka);
    fill(s.cue_both, "missions that genuinely need both " + ka + " and " + kb);
  }
  return s;
}

std::string boundary_user_prompt(const BoundarySpec& spec, SkillVector arm, const std::string& cue,
                                 std::size_t count) {
  std::ostringstream os;
  os << "Task count: " << count << "\n";
  os << "Required skills: ";
  bool first = true;
  for (Skill s : arm.skills()) {
    os << (first ? "" : ", ") << skill_key(s);
    first = false;
  }
  os << "\n";
  os << "These tasks sharpen the boundary between " << skill_key(spec.a) << " and " << skill_key(spec.b)
     << ". Every task must need exactly the required skills above and no other skill.\n";
  os << "Emphasize: " << cue << ".\n";
  os << "Write exactly " << count << " new tasks, one JSON object per line.\n";
  return os.str();
}

GenerationResult generate_boundary_tasks(const BoundarySpec& raw_spec, const ProviderProfile& profile,
                                         ChatProvider& provider, const GenerateOptions& options) {
  raw_spec.validate();
  profile.validate();
  const auto spec = raw_spec.with_default_cues();
  struct Arm {
    SkillVector label;
    std::size_t count;
    std::string cue;
  };
  const std::vector<Arm> arms = {
      {SkillVector().set(spec.a), spec.a_only, spec.cue_a},
      {SkillVector().set(spec.b), spec.b_only, spec.cue_b},
      {SkillVector().set(spec.a).set(spec.b), spec.both, spec.cue_both},
  };

  const auto system = generation_system_prompt();
  std::vector<ChatRequest> requests;
  std::vector<std::size_t> arm_of;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i].count == 0) continue;
    requests.push_back(ChatRequest{system, boundary_user_prompt(spec, arms[i].label, arms[i].cue, arms[i].count),
                                   profile.temperature, profile.max_output_tokens});
    arm_of.push_back(i);
  }
  const auto replies = run_requests(provider, requests, profile, options);

  GenerationResult result;
  result.report.name = "boundary-" + std::string(skill_key(spec.a)) + "-" + std::string(skill_key(spec.b));
  result.report.provider = profile.name;
  result.report.requested = spec.a_only + spec.b_only + spec.both;
  result.report.calls = requests.size();
  std::string raw_sample;
  for (std::size_t r = 0; r < replies.size(); ++r) {
    const auto& arm = arms[arm_of[r]];
    std::size_t taken = 0;
    if (raw_sample.size() < 500) raw_sample += replies[r].content.substr(0, 500 - raw_sample.size());
    for_each_line(replies[r].content, [&](std::string_view line) {
      if (taken >= arm.count) return;
      json raw = json::parse(line, nullptr, false);
      if (!raw.is_object() || !raw.contains("text")) {
        ++result.report.dropped;
        return;
      }
      // A model-supplied label that contradicts the arm means the text is off-target.
      if (raw.contains("skills")) {
        json probe = raw;
        probe["id"] = "probe";
        probe["source"] = "boundary";
        probe["split"] = nullptr;
        if (!probe.contains("domain")) probe["domain"] = "other";
        auto pv = validate_task_record(probe);
        if (!pv.ok() || pv.record->skills != arm.label) {
          ++result.report.dropped;
          return;
        }
      }
      json rec = {{"id", make_id(result.report.name, result.records.size() + 1)},
                  {"text", raw["text"]},
                  {"skills", skills_to_json(arm.label)},
                  {"domain", raw.contains("domain") ? raw["domain"] : json("other")},
                  {"source", "boundary"},
                  {"split", nullptr}};
      auto v = validate_task_record(rec);
      if (!v.ok()) {
        ++result.report.dropped;
        return;
      }
      result.records.push_back(std::move(*v.record));
      ++taken;
    });
  }
  result.report.parsed = result.records.size();
  if (result.records.empty()) {
    throw GenerationFailedError("boundary batch: no parseable records from " + profile.name, raw_sample);
  }
  return result;
}

std::optional<std::pair<Skill, Skill>> select_weakest_boundary(const BoundaryReport& report) {
  std::size_t best = 0;
  std::optional<std::size_t> best_index;
  for (std::size_t p = 0; p < report.pair_counts.size(); ++p) {
    if (report.pair_counts[p] > best) {
      best = report.pair_counts[p];
      best_index = p;
    }
  }
  if (!best_index) return std::nullopt;
  return skill_pairs()[*best_index];
}

std::vector<std::string> token_set(std::string_view text) {
  std::set<std::string> tokens;
  std::string cur;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!cur.empty()) {
      tokens.insert(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.insert(std::move(cur));
  return {tokens.begin(), tokens.end()};
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

DedupeResult dedupe(std::span<const TaskRecord> records, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ArgumentError("dedupe threshold must be in (0, 1], got " + std::to_string(threshold));
  }
  DedupeResult out;
  std::vector<std::vector<std::string>> kept_tokens;
  for (const auto& r : records) {
    auto tokens = token_set(r.text);
    std::optional<std::size_t> match;
    for (std::size_t k = 0; k < kept_tokens.size(); ++k) {
      if (jaccard(tokens, kept_tokens[k]) >= threshold) {
        match = k;
        break;
      }
    }
    if (match) {
      out.dropped.push_back(r);
      out.duplicate_of.push_back(out.kept[*match].id);
    } else {
      out.kept.push_back(r);
      kept_tokens.push_back(std::move(tokens));
    }
  }
  return out;
}

std::vector<TaskRecord> sample_for_audit(std::span<const TaskRecord> records, std::size_t n, std::uint64_t seed) {
  if (n > records.size()) {
    throw ArgumentError("cannot sample " + std::to_string(n) + " of " + std::to_string(records.size()) + " records");
  }
  std::vector<std::size_t> idx(records.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span(idx));
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<TaskRecord> out;
  out.reserve(n);
  for (auto i : idx) out.push_back(records[i]);
  return out;
}

std::string serialize_audit_worksheet(std::span<const TaskRecord> records) {
  std::string out;
  for (const auto& r : records) {
    auto j = to_json(r);
    j["verdict"] = nullptr;
    j["relabel_skills"] = nullptr;
    j["note"] = "";
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

void write_audit_worksheet(std::span<const TaskRecord> records, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_audit_worksheet(records));
}

std::vector<AuditDecision> parse_audit_worksheet(std::string_view contents) {
  std::vector<AuditDecision> out;
  std::vector<std::string> errors;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    auto line = contents.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    json raw = json::parse(line, nullptr, false);
    if (!raw.is_object()) {
      errors.push_back(where + "malformed JSON");
      continue;
    }
    json verdict = raw.value("verdict", json());
    json relabel = raw.value("relabel_skills", json());
    json note = raw.value("note", json(""));
    raw.erase("verdict");
    raw.erase("relabel_skills");
    raw.erase("note");
    auto v = validate_task_record(raw);
    if (!v.ok()) {
      for (const auto& e : v.violations) errors.push_back(where + e);
      continue;
    }
    if (verdict.is_null()) continue;
    AuditDecision d;
    d.id = v.record->id;
    d.note = note.is_string() ? note.get<std::string>() : "";
    const auto vs = verdict.is_string() ? verdict.get<std::string>() : "";
    if (vs == "accept") {
      d.verdict = Verdict::kAccept;
    } else if (vs == "reject") {
      d.verdict = Verdict::kReject;
    } else if (vs == "relabel") {
      d.verdict = Verdict::kRelabel;
      json probe = raw;
      probe["skills"] = relabel;
      auto pv = validate_task_record(probe);
      if (!relabel.is_object() || !pv.ok()) {
        errors.push_back(where + "relabel needs 'relabel_skills' with six booleans and at least one true");
        continue;
      }
      d.replacement = pv.record->skills;
    } else {
      errors.push_back(where + "verdict must be null, accept, reject or relabel");
      continue;
    }
    out.push_back(std::move(d));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return out;
}

std::vector<AuditDecision> read_audit_worksheet(const std::filesystem::path& path) {
  return parse_audit_worksheet(read_file(path));
}

AuditOutcome apply_audit(std::span<const TaskRecord> records, std::span<const AuditDecision> decisions) {
  std::unordered_map<std::string, const AuditDecision*> by_id;
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.id);
  std::vector<std::string> errors;
  for (const auto& d : decisions) {
    if (!ids.count(d.id)) {
      errors.push_back("decision for unknown id '" + d.id + "'");
      continue;
    }
    if (!by_id.emplace(d.id, &d).second) errors.push_back("duplicate decisions for id '" + d.id + "'");
    if (d.verdict == Verdict::kRelabel && (!d.replacement || d.replacement->none())) {
      errors.push_back("relabel of '" + d.id + "' needs a replacement with at least one skill");
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));

  AuditOutcome out;
  for (const auto& r : records) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      ++out.summary.undecided;
      out.records.push_back(r);
      continue;
    }
    switch (it->second->verdict) {
      case Verdict::kAccept:
        ++out.summary.accepted;
        out.records.push_back(r);
        break;
      case Verdict::kReject:
        ++out.summary.rejected;
        break;
      case Verdict::kRelabel: {
        ++out.summary.relabeled;
        TaskRecord copy = r;
        copy.skills = *it->second->replacement;
        out.records.push_back(std::move(copy));
        break;
      }
    }
  }
  return out;
}

PipelineConfig pipeline_config_from_json(const json& j) {
  PipelineConfig c;
  try {
    c.dedupe_threshold = j.value("dedupe_threshold", c.dedupe_threshold);
    c.seed = j.value("seed", c.seed);
    c.chunk_size = j.value("chunk_size", c.chunk_size);
    c.parallelism = j.value("parallelism", c.parallelism);
    if (j.contains("domains")) c.domains = j["domains"].get<std::vector<std::string>>();
    for (const auto& b : j.at("batches")) {
      PipelineBatch pb;
      pb.name = b.at("name").get<std::string>();
      pb.count = b.at("count").get<std::size_t>();
      pb.provider = provider_profile_from_json(b.value("provider", json::object()));
      pb.provider_kind = b.value("provider_kind", pb.provider_kind);
      pb.use_prior_context = b.value("use_prior_context", pb.use_prior_context);
      c.batches.push_back(std::move(pb));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed pipeline config: ") + e.what());
  }
  if (c.batches.empty()) throw ConfigError("pipeline config needs at least one batch");
  // Batch names prefix record ids, so they must be distinct.
  for (std::size_t i = 0; i < c.batches.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (c.batches[i].name == c.batches[k].name) {
        throw ConfigError("duplicate batch name '" + c.batches[i].name + "'");
      }
    }
  }
  return c;
}

ordered_json to_json(const PipelineResult& r, double dedupe_threshold) {
  ordered_json j;
  ordered_json batches = ordered_json::array();
  for (const auto& b : r.batches) batches.push_back(to_json(b));
  j["batches"] = batches;
  j["dedupe_threshold"] = dedupe_threshold;
  j["deduped"] = r.deduped;
  j["kept"] = r.records.size();
  return j;
}

PipelineResult run_generation_pipeline(const PipelineConfig& config, std::span<ChatProvider* const> providers,
                                       const Sleeper& sleep) {
  if (providers.size() != config.batches.size()) throw ArgumentError("one provider per batch is required");
  std::vector<TaskRecord> all;
  std::vector<BatchReport> reports;
  std::unordered_map<std::string, std::size_t> batch_of;  // record id -> batch index
  for (std::size_t i = 0; i < config.batches.size(); ++i) {
    const auto& b = config.batches[i];
    GenerationBatchSpec spec;
    spec.batch_name = b.name;
    spec.provider = b.provider;
    spec.count = b.count;
    spec.domains = config.domains;
    spec.seed = config.seed + i;
    spec.chunk_size = config.chunk_size;
    if (b.use_prior_context) spec.context = context_excerpt(all, spec.seed);
    auto gen = generate_tasks(spec, *providers[i], GenerateOptions{config.parallelism, sleep});
    for (auto& r : gen.records) {
      batch_of[r.id] = i;
      all.push_back(std::move(r));
    }
    reports.push_back(gen.report);
  }
  auto d = dedupe(all, config.dedupe_threshold);
  for (const auto& r : d.dropped) ++reports[batch_of.at(r.id)].deduped;
  return PipelineResult{std::move(d.kept), std::move(reports), d.dropped.size()};
}

PipelineResult run_generation_pipeline(const PipelineConfig& config, const Sleeper& sleep) {
  std::vector<std::unique_ptr<ChatProvider>> owned;
  std::vector<ChatProvider*> ptrs;
  for (const auto& b : config.batches) {
    owned.push_back(make_provider(b.provider, b.provider_kind));
    ptrs.push_back(owned.back().get());
  }
  return run_generation_pipeline(config, ptrs, sleep);
}

}  // namespace skillroute
