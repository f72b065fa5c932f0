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

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "skillroute/dataset.hpp"
#include "skillroute/skills.hpp"

namespace skillroute {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct PerSkillPrf {
  std::array<double, kNumSkills> precision{};
  std::array<double, kNumSkills> recall{};
  std::array<double, kNumSkills> f1{};
  std::array<Confusion, kNumSkills> confusion{};
  double macro_f1 = 0.0;
};

struct MetricsReport {
  std::size_t n = 0;
  double exact_match = 0.0;
  double hamming_score = 0.0;
  PerSkillPrf per_skill;

  double macro_f1() const { return per_skill.macro_f1; }
};

// All metric functions require equal, non-empty inputs and throw
// ArgumentError otherwise.

double exact_match(std::span<const SkillVector> truths, std::span<const SkillVector> preds);

/// Correct bits over all 6*n bits.
double hamming_score(std::span<const SkillVector> truths, std::span<const SkillVector> preds);

/// F1 = 2TP / (2TP + FP + FN). A zero denominator (skill absent from both
/// sides) scores precision = recall = F1 = 1.0; the same rule applies to
/// precision and recall individually.
PerSkillPrf per_skill_prf(std::span<const SkillVector> truths, std::span<const SkillVector> preds);

MetricsReport evaluate(std::span<const SkillVector> truths, std::span<const SkillVector> preds);

nlohmann::ordered_json to_json(const MetricsReport& r);
MetricsReport metrics_report_from_json(const nlohmann::json& j);

/// Errored tasks attributed to confusable skill pairs. A task counts toward
/// pair (a, b) when its set of wrong bits is non-empty and contained in {a, b}.
struct BoundaryReport {
  std::size_t total_errors = 0;
  std::array<std::size_t, 15> pair_counts{};  // canonical pair order
  std::array<std::size_t, kNumSkills> skill_error_bits{};

  std::size_t count(Skill a, Skill b) const;
};

BoundaryReport mine_boundary_errors(std::span<const SkillVector> truths, std::span<const SkillVector> preds);
nlohmann::ordered_json to_json(const BoundaryReport& r);
BoundaryReport boundary_report_from_json(const nlohmann::json& j);

struct LatencyReport {
  std::vector<double> samples_ms;
  std::size_t count = 0;
  std::size_t failed = 0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  bool batching = false;
};

/// What the timed callee reports about one call.
struct CallOutcome {
  bool ok = true;
  double excluded_seconds = 0.0;  // e.g. rate-limit backoff, subtracted from the sample
};

using TimedCall = std::function<CallOutcome(const std::string& text)>;

/// Sequential single-sample timing. Warmup calls cycle through `texts` and
/// are not recorded. Failed calls are counted and excluded from percentiles.
/// Throws when no call succeeds.
LatencyReport measure_latency(const TimedCall& call, std::span<const std::string> texts, std::size_t warmup);

/// Median (mean of the two middle values for even counts) and nearest-rank p95.
void summarize_latency(LatencyReport& report);
nlohmann::ordered_json to_json(const LatencyReport& r);

/// Rounds half away from zero at the given number of decimals.
std::string format_fixed(double value, int decimals);
std::string format_percent(double rate);  // 0.835 -> "83.5"
std::string format_f1(double f1);         // 0.9413 -> "0.941"

/// Headline table (EM %, Hamming %, macro F1) sorted by EM descending, then
/// the per-skill F1 table with one column per model.
std::string compare_models(std::vector<std::pair<std::string, MetricsReport>> reports);

struct PredictionRecord {
  TaskRecord record;
  SkillVector predicted;
  std::array<double, kNumSkills> probabilities{};
};

/// Dataset line plus "predicted_skills" and "probabilities".
nlohmann::ordered_json to_json(const PredictionRecord& p);
std::string serialize_predictions(std::span<const PredictionRecord> preds);
void write_predictions(std::span<const PredictionRecord> preds, const std::filesystem::path& path);
std::vector<PredictionRecord> parse_predictions(std::string_view contents);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

/// Pairs predictions with dataset labels by id. Every dataset record must
/// have a prediction.
MetricsReport evaluate_predictions(std::span<const TaskRecord> dataset, std::span<const PredictionRecord> preds);

}  // namespace skillroute
