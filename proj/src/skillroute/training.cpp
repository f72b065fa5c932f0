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

#include "skillroute/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"
#include "skillroute/metrics.hpp"
#include "skillroute/rng.hpp"

namespace skillroute {

using nlohmann::json;
using nlohmann::ordered_json;

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (!(inner_fraction > 0.0 && inner_fraction < 0.5)) throw ArgumentError("inner_fraction must be in (0, 0.5)");
  if (lr_head <= 0.0 || lr_encoder < 0.0) throw ArgumentError("learning rates must be positive");
  if (weight_decay < 0.0) throw ArgumentError("weight_decay must be >= 0");
  if (dropout < 0.0 || dropout >= 1.0) throw ArgumentError("dropout must be in [0, 1)");
  if (!(threshold_step > 0.0 && threshold_step <= 0.1)) throw ArgumentError("threshold_step must be in (0, 0.1]");
  if (!(pos_weight_min > 0.0 && pos_weight_min <= pos_weight_max)) {
    throw ArgumentError("pos-weight clamp bounds must satisfy 0 < min <= max");
  }
}

ordered_json to_json(const TrainConfig& c) {
  ordered_json j;
  j["name"] = c.name;
  j["backend"] = c.backend;
  j["seed"] = c.seed;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["lr_head"] = c.lr_head;
  j["lr_encoder"] = c.lr_encoder;
  j["weight_decay"] = c.weight_decay;
  j["unfrozen_blocks"] = c.unfrozen_blocks;
  j["dropout"] = c.dropout;
  j["inner_fraction"] = c.inner_fraction;
  j["patience"] = c.patience;
  j["tune_thresholds"] = c.tune_thresholds;
  j["threshold_step"] = c.threshold_step;
  j["pos_weight_min"] = c.pos_weight_min;
  j["pos_weight_max"] = c.pos_weight_max;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.name = j.value("name", c.name);
  c.backend = j.value("backend", c.backend);
  c.seed = j.value("seed", c.seed);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr_head = j.value("lr_head", c.lr_head);
  c.lr_encoder = j.value("lr_encoder", c.lr_encoder);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.unfrozen_blocks = j.value("unfrozen_blocks", c.unfrozen_blocks);
  c.dropout = j.value("dropout", c.dropout);
  c.inner_fraction = j.value("inner_fraction", c.inner_fraction);
  c.patience = j.value("patience", c.patience);
  c.tune_thresholds = j.value("tune_thresholds", c.tune_thresholds);
  c.threshold_step = j.value("threshold_step", c.threshold_step);
  c.pos_weight_min = j.value("pos_weight_min", c.pos_weight_min);
  c.pos_weight_max = j.value("pos_weight_max", c.pos_weight_max);
  c.validate();
  return c;
}

std::string TrainConfig::hash() const { return sha256_hex(to_json(*this).dump()).substr(0, 16); }

PosWeightResult compute_pos_weights(std::span<const TaskRecord> records, double lo, double hi) {
  if (records.empty()) throw ArgumentError("pos-weights need at least one record");
  PosWeightResult out;
  for (Skill s : kAllSkills) {
    std::size_t pos = 0;
    for (const auto& r : records) pos += r.skills.test(s);
    const std::size_t neg = records.size() - pos;
    auto& w = out.weights[index_of(s)];
    if (pos == 0) {
      w = 1.0;
      out.warnings.push_back("skill '" + std::string(skill_key(s)) + "' has no positives; pos-weight set to 1.0");
      continue;
    }
    w = std::clamp(static_cast<double>(neg) / static_cast<double>(pos), lo, hi);
  }
  return out;
}

namespace {

void check_loss_shapes(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets) {
  if (logits.rows() != targets.rows() || logits.cols() != targets.cols() ||
      logits.cols() != static_cast<Eigen::Index>(kNumSkills)) {
    throw ArgumentError("logits and targets must both be batch x 6");
  }
  if (logits.rows() == 0) throw ArgumentError("empty batch");
}

}  // namespace

double weighted_bce_loss(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets, const PosWeights& weights) {
  check_loss_shapes(logits, targets);
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      const double z = logits(r, c);
      const double y = targets(r, c);
      // -log sigmoid(z) = softplus(-z); -log(1 - sigmoid(z)) = softplus(z)
      total += weights[static_cast<std::size_t>(c)] * y * softplus(-z) + (1.0 - y) * softplus(z);
    }
  }
  return total / static_cast<double>(logits.size());
}

Eigen::MatrixXd weighted_bce_grad(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets,
                                  const PosWeights& weights) {
  check_loss_shapes(logits, targets);
  Eigen::MatrixXd g(logits.rows(), logits.cols());
  const double scale = 1.0 / static_cast<double>(logits.size());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      const double p = sigmoid(logits(r, c));
      const double y = targets(r, c);
      g(r, c) = scale * (weights[static_cast<std::size_t>(c)] * y * (p - 1.0) + (1.0 - y) * p);
    }
  }
  return g;
}

AdamW::AdamW(std::vector<Group> groups, double weight_decay, double beta1, double beta2, double eps)
    : groups_(std::move(groups)), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& g : groups_) {
    auto& gm = m_.emplace_back();
    auto& gv = v_.emplace_back();
    for (const auto& p : g.params) {
      gm.emplace_back(p.size, 0.0);
      gv.emplace_back(p.size, 0.0);
    }
  }
}

void AdamW::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const double lr = groups_[gi].lr;
    for (std::size_t pi = 0; pi < groups_[gi].params.size(); ++pi) {
      const auto& p = groups_[gi].params[pi];
      auto& m = m_[gi][pi];
      auto& v = v_[gi][pi];
      for (std::size_t k = 0; k < p.size; ++k) {
        const double g = p.grad[k];
        m[k] = beta1_ * m[k] + (1.0 - beta1_) * g;
        v[k] = beta2_ * v[k] + (1.0 - beta2_) * g * g;
        p.data[k] -= lr * weight_decay_ * p.data[k];
        p.data[k] -= lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps_);
      }
    }
  }
}

ordered_json to_json(const ThresholdSet& t) {
  ordered_json j;
  j["objective"] = t.objective;
  j["n"] = t.n;
  j["thresholds"] = t.thresholds;
  j["tuned_f1"] = t.tuned_f1;
  j["default_f1"] = t.default_f1;
  return j;
}

std::vector<double> threshold_grid(double step) {
  if (!(step > 0.0 && step <= 0.1)) throw ArgumentError("grid step must be in (0, 0.1]");
  std::vector<double> grid;
  for (std::size_t k = 1;; ++k) {
    const double v = std::round(static_cast<double>(k) * step * 1e9) / 1e9;
    if (v > 1.0 - step + 1e-12) break;
    grid.push_back(v);
  }
  if (std::find(grid.begin(), grid.end(), 0.5) == grid.end()) {
    grid.insert(std::upper_bound(grid.begin(), grid.end(), 0.5), 0.5);
  }
  return grid;
}

namespace {

double skill_f1(std::span<const Probabilities> probs, std::span<const SkillVector> truths, std::size_t s, double tau) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool p = probs[i][s] >= tau;
    const bool t = truths[i].test(s);
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  const std::size_t den = 2 * tp + fp + fn;
  return den == 0 ? 1.0 : static_cast<double>(2 * tp) / static_cast<double>(den);
}

}  // namespace

ThresholdSet tune_thresholds(std::span<const Probabilities> probabilities, std::span<const SkillVector> truths,
                             double step) {
  if (probabilities.empty()) throw ArgumentError("threshold tuning needs a non-empty split");
  if (probabilities.size() != truths.size()) throw ArgumentError("probabilities and labels differ in length");
  const auto grid = threshold_grid(step);
  ThresholdSet out;
  out.n = probabilities.size();
  for (std::size_t s = 0; s < kNumSkills; ++s) {
    double best_tau = 0.5;
    double best_f1 = -1.0;
    for (double tau : grid) {
      const double f1 = skill_f1(probabilities, truths, s, tau);
      const bool better = f1 > best_f1 ||
                          (f1 == best_f1 && (std::fabs(tau - 0.5) < std::fabs(best_tau - 0.5) ||
                                             (std::fabs(tau - 0.5) == std::fabs(best_tau - 0.5) && tau < best_tau)));
      if (better) {
        best_f1 = f1;
        best_tau = tau;
      }
    }
    out.thresholds[s] = best_tau;
    out.tuned_f1[s] = best_f1;
    out.default_f1[s] = skill_f1(probabilities, truths, s, 0.5);
  }
  return out;
}

ThresholdSet tune_thresholds(const EnsembleModel& model, std::span<const TaskRecord> records, double step) {
  std::vector<Probabilities> probs;
  std::vector<SkillVector> truths;
  for (const auto& r : records) {
    probs.push_back(predict_ensemble(model, r.text).probabilities);
    truths.push_back(r.skills);
  }
  return tune_thresholds(probs, truths, step);
}

ordered_json to_json(const TrainReport& r) {
  ordered_json j;
  j["config_hash"] = r.config_hash;
  j["train_size"] = r.train_size;
  j["inner_size"] = r.inner_size;
  j["best_epoch"] = r.best_epoch;
  j["best_inner_em"] = r.best_inner_em;
  j["epochs_run"] = r.epochs.size();
  j["pos_weights"] = r.pos_weights;
  j["warnings"] = r.warnings;
  ordered_json epochs = ordered_json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"inner_em", e.inner_em},
                      {"inner_macro_f1", e.inner_macro_f1}});
  }
  j["epochs"] = epochs;
  j["thresholds"] = r.thresholds ? to_json(*r.thresholds) : ordered_json(nullptr);
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

namespace {

struct Example {
  TokenStates frozen;  // after the frozen blocks
  SkillVector label;
};

struct TopCache {
  std::vector<TokenBlock::Cache> blocks;
};

/// Runs the trainable top blocks and pools. Returns the pooled embedding.
Eigen::VectorXd top_forward(const EncoderBackend& enc, const TokenStates& frozen, TopCache* cache) {
  const std::size_t first = enc.num_blocks() - enc.trainable_blocks();
  Eigen::MatrixXd h = frozen.tokens;
  if (cache) cache->blocks.resize(enc.trainable_blocks());
  for (std::size_t b = first; b < enc.num_blocks(); ++b) {
    h = enc.blocks()[b].forward(h, cache ? &cache->blocks[b - first] : nullptr);
  }
  return mean_pool(h, frozen.mask);
}

void top_backward(EncoderBackend& enc, const TokenStates& frozen, const TopCache& cache,
                  const Eigen::RowVectorXd& grad_pooled) {
  const std::size_t first = enc.num_blocks() - enc.trainable_blocks();
  Eigen::MatrixXd grad = (frozen.mask / frozen.mask.sum()) * grad_pooled;
  for (std::size_t b = enc.num_blocks(); b-- > first;) {
    grad = enc.blocks()[b].backward(cache.blocks[b - first], grad);
  }
}

std::vector<Example> prepare(const EncoderBackend& enc, std::span<const TaskRecord> records) {
  std::vector<Example> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back({enc.frozen_states(r.text), r.skills});
  return out;
}

MetricsReport evaluate_inner(const MemberModel& m, const std::vector<Example>& examples) {
  std::vector<SkillVector> truths, preds;
  for (const auto& ex : examples) {
    const auto emb = top_forward(m.backend(), ex.frozen, nullptr);
    const auto logits = head_forward(m.head(), emb);
    truths.push_back(ex.label);
    preds.push_back(apply_thresholds(sigmoid(logits), kDefaultThresholds));
  }
  return evaluate(truths, preds);
}

}  // namespace

TrainedMember train_member(const TrainConfig& config, std::span<const TaskRecord> records) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  if (records.size() < 3) throw ArgumentError("training needs at least three records");

  const auto inner_count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(config.inner_fraction * static_cast<double>(records.size()))));
  auto split = stratified_split(records, inner_count, config.seed);
  if (split.train.size() < 2 * config.batch_size) {
    throw ArgumentError("training split of " + std::to_string(split.train.size()) +
                        " records is smaller than two batches of " + std::to_string(config.batch_size));
  }

  MemberModel model = make_member(config.name, config.backend, config.seed, config.dropout, config.unfrozen_blocks);
  auto& enc = model.backend();
  auto& head = model.head();

  const auto pw = compute_pos_weights(split.train, config.pos_weight_min, config.pos_weight_max);
  const auto train = prepare(enc, split.train);
  const auto inner = prepare(enc, split.test);

  std::vector<AdamW::Group> groups = {{head.parameters(), config.lr_head}};
  if (enc.trainable_blocks() > 0) {
    std::vector<TensorRef> top;
    for (std::size_t b = enc.num_blocks() - enc.trainable_blocks(); b < enc.num_blocks(); ++b) {
      enc.blocks()[b].collect("encoder.block" + std::to_string(b), top);
    }
    groups.push_back({std::move(top), config.lr_encoder});
  }
  AdamW optimizer(std::move(groups), config.weight_decay);

  Rng order_rng(config.seed ^ 0x5eed0001ULL);
  Rng dropout_rng(config.seed ^ 0x5eed0002ULL);

  TrainReport report;
  report.config_hash = config.hash();
  report.pos_weights = pw.weights;
  report.warnings = pw.warnings;
  report.train_size = split.train.size();
  report.inner_size = split.test.size();

  std::optional<MemberModel> best;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const auto dim = static_cast<Eigen::Index>(enc.dim());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    order_rng.shuffle(std::span(order));
    // Batch boundaries; a trailing batch of one joins its predecessor because
    // batch normalization needs two samples.
    std::vector<std::pair<std::size_t, std::size_t>> batches;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      batches.emplace_back(b, std::min(order.size(), b + config.batch_size));
    }
    if (batches.size() > 1 && batches.back().second - batches.back().first == 1) {
      batches[batches.size() - 2].second = batches.back().second;
      batches.pop_back();
    }

    double loss_sum = 0.0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const auto [lo, hi] = batches[bi];
      const auto n = static_cast<Eigen::Index>(hi - lo);
      Eigen::MatrixXd x(n, dim);
      Eigen::MatrixXd y(n, static_cast<Eigen::Index>(kNumSkills));
      std::vector<TopCache> caches(hi - lo);
      for (std::size_t k = lo; k < hi; ++k) {
        const auto& ex = train[order[k]];
        const auto row = static_cast<Eigen::Index>(k - lo);
        x.row(row) = top_forward(enc, ex.frozen, &caches[k - lo]).transpose();
        for (std::size_t s = 0; s < kNumSkills; ++s) y(row, static_cast<Eigen::Index>(s)) = ex.label.test(s) ? 1.0 : 0.0;
      }

      head.zero_grad();
      for (auto& b : enc.blocks()) b.zero_grad();
      ClassifierHead::Cache cache;
      const Eigen::MatrixXd logits = head.forward_train(x, dropout_rng, cache);
      const double loss = weighted_bce_loss(logits, y, pw.weights);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(bi + 1) + " (max |logit| " + std::to_string(logits.cwiseAbs().maxCoeff()) +
                            ")");
      }
      loss_sum += loss * static_cast<double>(n);
      const Eigen::MatrixXd grad_x = head.backward(cache, weighted_bce_grad(logits, y, pw.weights));
      if (enc.trainable_blocks() > 0) {
        for (std::size_t k = lo; k < hi; ++k) {
          top_backward(enc, train[order[k]].frozen, caches[k - lo], grad_x.row(static_cast<Eigen::Index>(k - lo)));
        }
      }
      optimizer.step();
    }

    const auto m = evaluate_inner(model, inner);
    report.epochs.push_back({epoch, loss_sum / static_cast<double>(train.size()), m.exact_match, m.macro_f1()});
    if (!best || m.exact_match > report.best_inner_em) {
      best = model;
      report.best_epoch = epoch;
      report.best_inner_em = m.exact_match;
      since_best = 0;
    } else if (++since_best >= config.patience && config.patience > 0) {
      break;
    }
  }

  MemberModel result = std::move(*best);
  result = MemberModel(result.name(), result.backend().clone(), result.head(), kDefaultThresholds,
                       ModelMetadata{report.config_hash, config.seed});
  if (config.tune_thresholds) {
    const auto tuned = tune_thresholds(EnsembleModel({result}), split.test, config.threshold_step);
    result.set_thresholds(tuned.thresholds);
    report.thresholds = tuned;
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return TrainedMember{std::move(result), std::move(report), std::move(split.test)};
}

}  // namespace skillroute
