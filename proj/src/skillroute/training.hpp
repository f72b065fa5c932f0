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

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillroute/dataset.hpp"
#include "skillroute/model.hpp"
#include "skillroute/tensor.hpp"

namespace skillroute {

struct TrainConfig {
  std::string name = "member";
  std::string backend = "hashing-bow";
  std::uint64_t seed = 0;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double lr_head = 1e-3;
  double lr_encoder = 2e-5;
  double weight_decay = 0.01;
  std::size_t unfrozen_blocks = 2;
  double dropout = 0.3;
  double inner_fraction = 0.15;
  std::size_t patience = 20;
  bool tune_thresholds = false;
  double threshold_step = 0.05;
  double pos_weight_min = 0.1;
  double pos_weight_max = 100.0;

  void validate() const;
  /// First 16 hex digits of sha256 over the canonical JSON form.
  std::string hash() const;
};

nlohmann::ordered_json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

using PosWeights = std::array<double, kNumSkills>;

struct PosWeightResult {
  PosWeights weights{};
  std::vector<std::string> warnings;
};

/// w_s = negatives_s / positives_s, clamped to [lo, hi]; a skill with no
/// positives gets 1.0 and a warning.
PosWeightResult compute_pos_weights(std::span<const TaskRecord> records, double lo = 0.1, double hi = 100.0);

/// Mean over batch and skills of
///   -[w_s * y * log sigmoid(z) + (1 - y) * log(1 - sigmoid(z))]
/// evaluated through softplus so that large |z| cannot overflow.
double weighted_bce_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets, const PosWeights& weights);
/// d loss / d logits for the loss above.
Eigen::MatrixXd weighted_bce_grad(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets,
                                  const PosWeights& weights);

/// Adam with decoupled weight decay. Each group has its own learning rate.
class AdamW {
 public:
  struct Group {
    std::vector<TensorRef> params;
    double lr = 1e-3;
  };

  AdamW(std::vector<Group> groups, double weight_decay, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step();

 private:
  std::vector<Group> groups_;
  std::vector<std::vector<std::vector<double>>> m_, v_;
  double weight_decay_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

struct ThresholdSet {
  Thresholds thresholds = kDefaultThresholds;
  std::string objective = "per_skill_f1";
  std::array<double, kNumSkills> tuned_f1{};
  std::array<double, kNumSkills> default_f1{};  // at 0.5, same split
  std::size_t n = 0;
};

nlohmann::ordered_json to_json(const ThresholdSet& t);

/// The candidate grid {step, 2*step, ..., <= 1 - step} with 0.5 added.
std::vector<double> threshold_grid(double step);

/// Per skill, the grid value maximizing that skill's F1. Ties go to the value
/// nearest 0.5, then to the smaller value.
ThresholdSet tune_thresholds(std::span<const Probabilities> probabilities, std::span<const SkillVector> truths,
                             double step);
ThresholdSet tune_thresholds(const EnsembleModel& model, std::span<const TaskRecord> records, double step);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double inner_em = 0.0;
  double inner_macro_f1 = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_inner_em = 0.0;
  PosWeights pos_weights{};
  std::vector<std::string> warnings;
  std::size_t train_size = 0;
  std::size_t inner_size = 0;
  std::optional<ThresholdSet> thresholds;
  double wall_seconds = 0.0;
  std::string config_hash;
};

nlohmann::ordered_json to_json(const TrainReport& r);

struct TrainedMember {
  MemberModel model;
  TrainReport report;
  std::vector<TaskRecord> inner_split;
};

/// Seeded inner split, weighted BCE, AdamW over the head and the unfrozen
/// encoder blocks, best-inner-EM checkpoint (ties keep the earlier epoch).
TrainedMember train_member(const TrainConfig& config, std::span<const TaskRecord> records);

}  // namespace skillroute
