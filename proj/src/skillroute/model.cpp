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

#include "skillroute/model.hpp"

#include <chrono>

#include "skillroute/dataset.hpp"
#include "skillroute/error.hpp"

namespace skillroute {

void validate_thresholds(std::span<const double> thresholds) {
  if (thresholds.size() != kNumSkills) {
    throw ArgumentError("expected 6 thresholds, got " + std::to_string(thresholds.size()));
  }
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw ArgumentError("thresholds must lie in (0, 1), got " + std::to_string(t));
  }
}

SkillVector apply_thresholds(std::span<const double> probabilities, std::span<const double> thresholds) {
  if (probabilities.size() != kNumSkills || thresholds.size() != kNumSkills) {
    throw ArgumentError("apply_thresholds needs 6 probabilities and 6 thresholds");
  }
  SkillVector v;
  for (std::size_t i = 0; i < kNumSkills; ++i) v.set(i, probabilities[i] >= thresholds[i]);
  return v;
}

nlohmann::ordered_json to_json(const PredictionResult& r) {
  nlohmann::ordered_json j;
  j["skills"] = skills_to_json(r.skills);
  j["probabilities"] = r.probabilities;
  j["member_probabilities"] = r.member_probabilities;
  j["latency_ms"] = r.latency_ms;
  j["truncated"] = r.truncated;
  return j;
}

MemberModel::MemberModel(std::string name, std::unique_ptr<EncoderBackend> backend, ClassifierHead head,
                         Thresholds thresholds, ModelMetadata meta)
    : name_(std::move(name)),
      backend_(std::move(backend)),
      head_(std::move(head)),
      thresholds_(thresholds),
      meta_(std::move(meta)) {
  if (!backend_) throw ConfigError("member model needs an encoder backend");
  if (backend_->dim() != head_.input_dim()) {
    throw ConfigError("backend dimension " + std::to_string(backend_->dim()) + " does not match head input " +
                      std::to_string(head_.input_dim()));
  }
  validate_thresholds(thresholds_);
}

MemberModel::MemberModel(const MemberModel& other)
    : name_(other.name_),
      backend_(other.backend_->clone()),
      head_(other.head_),
      thresholds_(other.thresholds_),
      meta_(other.meta_) {}

MemberModel& MemberModel::operator=(const MemberModel& other) {
  if (this != &other) {
    MemberModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void MemberModel::set_thresholds(const Thresholds& t) {
  validate_thresholds(t);
  thresholds_ = t;
}

std::array<double, kNumSkills> MemberModel::logits(std::string_view text, bool* truncated) const {
  const auto e = embed(*backend_, text);
  if (truncated) *truncated = e.truncated;
  return head_forward(head_, e.vector);
}

Probabilities sigmoid(const std::array<double, kNumSkills>& logits) {
  Probabilities p{};
  for (std::size_t i = 0; i < kNumSkills; ++i) p[i] = sigmoid(logits[i]);
  return p;
}

Probabilities MemberModel::probabilities(std::string_view text, bool* truncated) const {
  return sigmoid(logits(text, truncated));
}

EnsembleModel::EnsembleModel(std::vector<MemberModel> members, Thresholds thresholds)
    : members_(std::move(members)), thresholds_(thresholds) {
  validate_thresholds(thresholds_);
}

void EnsembleModel::set_thresholds(const Thresholds& t) {
  validate_thresholds(t);
  thresholds_ = t;
}

std::string EnsembleModel::name() const {
  std::string out;
  for (const auto& m : members_) {
    if (!out.empty()) out += "+";
    out += m.name();
  }
  return out;
}

Probabilities average_probabilities(std::span<const Probabilities> members) {
  if (members.empty()) throw ConfigError("ensemble has no members");
  Probabilities out{};
  for (const auto& m : members) {
    for (std::size_t i = 0; i < kNumSkills; ++i) out[i] += m[i];
  }
  for (auto& v : out) v /= static_cast<double>(members.size());
  return out;
}

PredictionResult predict_member(const MemberModel& model, std::string_view text) {
  const auto start = std::chrono::steady_clock::now();
  PredictionResult r;
  r.probabilities = model.probabilities(text, &r.truncated);
  r.skills = apply_thresholds(r.probabilities, model.thresholds());
  r.member_probabilities = {r.probabilities};
  r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

PredictionResult predict_ensemble(const EnsembleModel& ensemble, std::string_view text) {
  if (ensemble.members().empty()) throw ConfigError("ensemble has no members");
  const auto start = std::chrono::steady_clock::now();
  PredictionResult r;
  for (const auto& m : ensemble.members()) {
    bool truncated = false;
    r.member_probabilities.push_back(m.probabilities(text, &truncated));
    r.truncated = r.truncated || truncated;
  }
  r.probabilities = average_probabilities(r.member_probabilities);
  r.skills = apply_thresholds(r.probabilities, ensemble.thresholds());
  r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

MemberModel make_member(const std::string& name, const std::string& backend, std::uint64_t seed, double dropout,
                        std::size_t trainable_blocks) {
  auto enc = make_backend(backend);
  enc->set_trainable_blocks(trainable_blocks);
  ClassifierHead head(enc->dim(), HeadConfig::for_input(enc->dim(), dropout), seed);
  return MemberModel(name, std::move(enc), std::move(head), kDefaultThresholds, ModelMetadata{"", seed});
}

}  // namespace skillroute
