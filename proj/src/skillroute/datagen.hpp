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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "skillroute/dataset.hpp"
#include "skillroute/metrics.hpp"
#include "skillroute/provider.hpp"

namespace skillroute {

inline constexpr std::size_t kMaxContextExamples = 50;
inline constexpr double kDefaultDedupeThreshold = 0.9;

struct GenerationBatchSpec {
  std::string batch_name = "batch";
  ProviderProfile provider;
  std::size_t count = 0;
  std::vector<std::string> domains;  // empty: all 22
  std::vector<TaskRecord> context;   // earlier batches, in pipeline order
  std::uint64_t seed = 0;
  std::size_t chunk_size = 25;       // tasks requested per provider call

  void validate() const;
};

struct GenerateOptions {
  int parallelism = 4;
  Sleeper sleep = real_sleeper();
};

struct BatchReport {
  std::string name;
  std::string provider;
  std::size_t requested = 0;
  std::size_t parsed = 0;
  std::size_t dropped = 0;
  std::size_t deduped = 0;
  std::size_t calls = 0;
};

nlohmann::ordered_json to_json(const BatchReport& r);

struct GenerationResult {
  std::vector<TaskRecord> records;
  BatchReport report;
};

std::string generation_system_prompt();
std::string generation_user_prompt(const GenerationBatchSpec& spec, std::size_t chunk_index,
                                   std::size_t chunk_count);

/// Up to 50 prior tasks sampled with `seed`, kept in their original order.
std::vector<TaskRecord> context_excerpt(std::span<const TaskRecord> prior, std::uint64_t seed,
                                        std::size_t max_examples = kMaxContextExamples);

/// Requests spec.count tasks in chunks. Unparseable or invalid lines are
/// dropped and counted, never repaired.
GenerationResult generate_tasks(const GenerationBatchSpec& spec, ChatProvider& provider,
                                const GenerateOptions& options = {});

struct BoundarySpec {
  Skill a = Skill::kLegs;
  Skill b = Skill::kWheels;
  std::size_t a_only = 0;
  std::size_t b_only = 0;
  std::size_t both = 0;
  std::string cue_a;
  std::string cue_b;
  std::string cue_both;

  void validate() const;
  /// Fills empty cue strings with defaults for the pair.
  BoundarySpec with_default_cues() const;
};

std::string boundary_user_prompt(const BoundarySpec& spec, SkillVector arm, const std::string& cue,
                                 std::size_t count);

/// Labels come from the arm that produced each record. Lines whose own
/// skills disagree with the arm are dropped.
GenerationResult generate_boundary_tasks(const BoundarySpec& spec, const ProviderProfile& profile,
                                         ChatProvider& provider, const GenerateOptions& options = {});

/// Pair with the most attributed errors; ties go to the canonically first
/// pair. nullopt when every pair count is zero.
std::optional<std::pair<Skill, Skill>> select_weakest_boundary(const BoundaryReport& report);

/// Case-folded, punctuation-stripped token set.
std::vector<std::string> token_set(std::string_view text);
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct DedupeResult {
  std::vector<TaskRecord> kept;
  std::vector<TaskRecord> dropped;
  std::vector<std::string> duplicate_of;  // parallel to dropped: id of the kept match
};

/// A record is dropped when its token-set Jaccard similarity with an earlier
/// kept record is >= threshold. threshold must be in (0, 1].
DedupeResult dedupe(std::span<const TaskRecord> records, double threshold = kDefaultDedupeThreshold);

std::vector<TaskRecord> sample_for_audit(std::span<const TaskRecord> records, std::size_t n,
                                         std::uint64_t seed);

enum class Verdict { kAccept, kReject, kRelabel };

struct AuditDecision {
  std::string id;
  Verdict verdict = Verdict::kAccept;
  std::optional<SkillVector> replacement;
  std::string note;
};

/// Worksheet lines are dataset lines plus verdict / relabel_skills / note.
std::string serialize_audit_worksheet(std::span<const TaskRecord> records);
void write_audit_worksheet(std::span<const TaskRecord> records, const std::filesystem::path& path);
/// Lines whose verdict is still null are skipped.
std::vector<AuditDecision> parse_audit_worksheet(std::string_view contents);
std::vector<AuditDecision> read_audit_worksheet(const std::filesystem::path& path);

struct AuditSummary {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t relabeled = 0;
  std::size_t undecided = 0;
};

struct AuditOutcome {
  std::vector<TaskRecord> records;
  AuditSummary summary;
};

AuditOutcome apply_audit(std::span<const TaskRecord> records, std::span<const AuditDecision> decisions);

struct PipelineBatch {
  std::string name;
  ProviderProfile provider;
  std::string provider_kind = "http";  // or "fixture[:seed]"
  std::size_t count = 0;
  bool use_prior_context = true;
};

struct PipelineConfig {
  std::vector<PipelineBatch> batches;
  std::vector<std::string> domains;
  double dedupe_threshold = kDefaultDedupeThreshold;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 25;
  int parallelism = 4;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

struct PipelineResult {
  std::vector<TaskRecord> records;  // after dedupe
  std::vector<BatchReport> batches;
  std::size_t deduped = 0;
};

nlohmann::ordered_json to_json(const PipelineResult& r, double dedupe_threshold);

/// Chained batches: each batch sees an excerpt of every earlier batch as
/// context, then the union is deduplicated.
PipelineResult run_generation_pipeline(const PipelineConfig& config, const Sleeper& sleep = real_sleeper());

/// Same, with caller-owned providers (one per batch).
PipelineResult run_generation_pipeline(const PipelineConfig& config, std::span<ChatProvider* const> providers,
                                       const Sleeper& sleep = real_sleeper());

}  // namespace skillroute
