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
#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "skillroute/rng.hpp"
#include "skillroute/skills.hpp"
#include "skillroute/tensor.hpp"

namespace skillroute {

enum class Mode { kTrain, kEval };

struct HeadConfig {
  std::size_t hidden1 = 512;
  std::size_t hidden2 = 256;
  std::size_t hidden3 = 128;
  double dropout = 0.3;

  /// 512/256/128 funnel, each width capped by the previous one and the first
  /// capped at twice the input dimension.
  static HeadConfig for_input(std::size_t input_dim, double dropout = 0.3);
};

nlohmann::json to_json(const HeadConfig& c);
HeadConfig head_config_from_json(const nlohmann::json& j);

/// Four affine layers. Each of the first three is followed by batch
/// normalization, GELU and dropout; the last emits six logits.
class ClassifierHead {
 public:
  static constexpr std::size_t kHidden = 3;

  ClassifierHead(std::size_t input_dim, HeadConfig config, std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  const HeadConfig& config() const { return config_; }

  struct LayerCache {
    Eigen::MatrixXd input;   // B x in
    Eigen::MatrixXd xhat;    // normalized pre-activation
    Eigen::VectorXd inv_std;
    Eigen::MatrixXd bn_out;  // gamma * xhat + beta (GELU input)
    Eigen::MatrixXd drop;    // dropout multipliers
  };
  struct Cache {
    std::array<LayerCache, kHidden> layers;
    Eigen::MatrixXd final_input;
  };

  /// Deterministic: batch statistics are the running ones, dropout is off.
  Eigen::MatrixXd forward_eval(const Eigen::MatrixXd& x) const;

  /// Batch statistics and dropout drawn from `rng`; updates running stats.
  /// Needs at least two rows.
  Eigen::MatrixXd forward_train(const Eigen::MatrixXd& x, Rng& rng, Cache& cache);

  /// Accumulates gradients and returns d loss / d input.
  Eigen::MatrixXd backward(const Cache& cache, const Eigen::MatrixXd& grad_logits);

  void zero_grad();
  /// Trainable parameters with their gradients.
  std::vector<TensorRef> parameters();
  /// Parameters plus batch-norm running statistics, for persistence.
  std::vector<TensorRef> state();

  void zero_output_layer();

 private:
  struct Linear {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;
    Eigen::MatrixXd gw;
    Eigen::VectorXd gb;
  };
  struct BatchNorm {
    Eigen::VectorXd gamma, beta, running_mean, running_var;
    Eigen::VectorXd g_gamma, g_beta;
  };

  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

  std::size_t input_dim_;
  HeadConfig config_;
  std::array<Linear, kHidden + 1> linear_;
  std::array<BatchNorm, kHidden> norm_;
};

/// One embedding (or a batch of rows) through the head. Train mode needs a
/// batch of at least two and an rng.
Eigen::MatrixXd head_forward(ClassifierHead& head, const Eigen::MatrixXd& embeddings, Mode mode,
                             Rng* rng = nullptr);
std::array<double, kNumSkills> head_forward(const ClassifierHead& head, const Eigen::VectorXd& embedding);

}  // namespace skillroute
