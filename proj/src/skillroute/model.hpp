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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "skillroute/encoder.hpp"
#include "skillroute/head.hpp"
#include "skillroute/skills.hpp"

namespace skillroute {

using Probabilities = std::array<double, kNumSkills>;
using Thresholds = std::array<double, kNumSkills>;

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr Thresholds kDefaultThresholds = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};

/// Bit i is set iff probabilities[i] >= thresholds[i].
SkillVector apply_thresholds(std::span<const double> probabilities, std::span<const double> thresholds);
void validate_thresholds(std::span<const double> thresholds);

struct PredictionResult {
  Probabilities probabilities{};
  SkillVector skills;
  std::vector<Probabilities> member_probabilities;
  double latency_ms = 0.0;
  bool truncated = false;
};

nlohmann::ordered_json to_json(const PredictionResult& r);

struct ModelMetadata {
  std::string config_hash;
  std::uint64_t seed = 0;
};

class MemberModel {
 public:
  MemberModel(std::string name, std::unique_ptr<EncoderBackend> backend, ClassifierHead head,
              Thresholds thresholds = kDefaultThresholds, ModelMetadata meta = {});
  MemberModel(const MemberModel& other);
  MemberModel& operator=(const MemberModel& other);
  MemberModel(MemberModel&&) noexcept = default;
  MemberModel& operator=(MemberModel&&) noexcept = default;

  const std::string& name() const { return name_; }
  const EncoderBackend& backend() const { return *backend_; }
  EncoderBackend& backend() { return *backend_; }
  const ClassifierHead& head() const { return head_; }
  ClassifierHead& head() { return head_; }
  const Thresholds& thresholds() const { return thresholds_; }
  void set_thresholds(const Thresholds& t);
  const ModelMetadata& metadata() const { return meta_; }

  std::array<double, kNumSkills> logits(std::string_view text, bool* truncated = nullptr) const;
  Probabilities probabilities(std::string_view text, bool* truncated = nullptr) const;

 private:
  std::string name_;
  std::unique_ptr<EncoderBackend> backend_;
  ClassifierHead head_;
  Thresholds thresholds_;
  ModelMetadata meta_;
};

/// Probability-averaging ensemble. Its thresholds override the members'.
class EnsembleModel {
 public:
  EnsembleModel() = default;
  explicit EnsembleModel(std::vector<MemberModel> members, Thresholds thresholds = kDefaultThresholds);

  const std::vector<MemberModel>& members() const { return members_; }
  std::vector<MemberModel>& members() { return members_; }
  const Thresholds& thresholds() const { return thresholds_; }
  void set_thresholds(const Thresholds& t);
  /// Member names joined with '+'.
  std::string name() const;

 private:
  std::vector<MemberModel> members_;
  Thresholds thresholds_ = kDefaultThresholds;
};

Probabilities sigmoid(const std::array<double, kNumSkills>& logits);

/// Element-wise arithmetic mean of member probability vectors.
Probabilities average_probabilities(std::span<const Probabilities> members);

PredictionResult predict_member(const MemberModel& model, std::string_view text);
/// Throws ConfigError for an ensemble without members.
PredictionResult predict_ensemble(const EnsembleModel& ensemble, std::string_view text);

/// A fresh, untrained member for the named backend.
MemberModel make_member(const std::string& name, const std::string& backend, std::uint64_t seed,
                        double dropout = 0.3, std::size_t trainable_blocks = 2);

}  // namespace skillroute
