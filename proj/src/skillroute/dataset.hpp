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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skillroute/skills.hpp"

namespace skillroute {

enum class Split { kUnassigned, kTrain, kTest };

std::string_view to_string(Split s);

/// The 22 application domains plus "other".
const std::vector<std::string>& known_domains();
bool is_known_domain(std::string_view domain);

struct TaskRecord {
  std::string id;
  std::string text;
  SkillVector skills;
  std::string domain;
  std::string source;
  Split split = Split::kUnassigned;

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

struct RecordValidation {
  std::optional<TaskRecord> record;
  std::vector<std::string> violations;

  bool ok() const { return record.has_value(); }
};

/// Checks one parsed dataset line against the line schema. Extra keys,
/// missing keys, empty text, all-zero labels and unknown splits are all
/// reported, each as its own violation.
RecordValidation validate_task_record(const nlohmann::json& raw);

/// As above but throws ValidationError.
TaskRecord parse_task_record(const nlohmann::json& raw);

nlohmann::ordered_json skills_to_json(SkillVector v);
nlohmann::ordered_json to_json(const TaskRecord& r);
std::string to_line(const TaskRecord& r);

std::vector<TaskRecord> read_dataset(const std::filesystem::path& path);
std::vector<TaskRecord> parse_dataset(std::string_view contents);
void write_dataset(std::span<const TaskRecord> records, const std::filesystem::path& path);
std::string serialize_dataset(std::span<const TaskRecord> records);

struct SplitResult {
  std::vector<TaskRecord> train;
  std::vector<TaskRecord> test;
};

/// Stratifies by full skill combination. Each combination gets its
/// largest-remainder share of `test_count`, capped so that combinations with
/// two or more records keep at least one in train. Output order follows input
/// order; split fields are set accordingly.
SplitResult stratified_split(std::span<const TaskRecord> records, std::size_t test_count,
                             std::uint64_t seed);

/// Per-combination test quota as used by stratified_split; exposed for tests.
std::map<std::uint8_t, std::size_t> stratified_quotas(const std::map<std::uint8_t, std::size_t>& sizes,
                                                      std::size_t test_count);

struct DatasetStats {
  std::size_t total = 0;
  std::array<std::size_t, kNumSkills> positives{};
  std::array<std::size_t, kNumSkills> negatives{};
  std::map<std::uint8_t, std::size_t> combinations;  // by mask
  std::map<std::string, std::size_t> domains;
  std::size_t train = 0;
  std::size_t test = 0;
  std::size_t unassigned = 0;

  std::size_t distinct_combinations() const { return combinations.size(); }
};

DatasetStats dataset_stats(std::span<const TaskRecord> records);
nlohmann::ordered_json to_json(const DatasetStats& s);
std::string render_stats(const DatasetStats& s);

}  // namespace skillroute
