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

#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "oracles.hpp"
#include "skillroute/bundle.hpp"
#include "skillroute/encoder.hpp"
#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"
#include "skillroute/head.hpp"
#include "skillroute/model.hpp"
#include "skillroute/training.hpp"

using namespace skillroute;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(gen);
  return m;
}

Eigen::MatrixXd random_targets(std::mt19937_64& gen, Eigen::Index r) {
  std::bernoulli_distribution coin(0.4);
  Eigen::MatrixXd y(r, 6);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = coin(gen) ? 1.0 : 0.0;
  return y;
}

}  // namespace

TEST(Encoder, TokenizeLowercasesAndSplits) {
  EXPECT_EQ(tokenize("Inspect the PIER, then re-check!"),
            (std::vector<std::string>{"inspect", "the", "pier", "then", "re", "check"}));
  EXPECT_TRUE(tokenize("  ...  ").empty());
}

TEST(Encoder, MeanPoolIgnoresMaskedRows) {
  Eigen::MatrixXd t(3, 2);
  t << 1, 2, 3, 4, 100, 100;
  Eigen::VectorXd mask(3);
  mask << 1, 1, 0;
  const auto p = mean_pool(t, mask);
  EXPECT_DOUBLE_EQ(p(0), 2.0);
  EXPECT_DOUBLE_EQ(p(1), 3.0);
  EXPECT_THROW(mean_pool(t, Eigen::VectorXd::Zero(3)), ArgumentError);
}

TEST(Encoder, DeterministicAndTruncates) {
  for (const auto& name : registered_backends()) {
    auto a = make_backend(name);
    auto b = make_backend(name);
    const auto ea = embed(*a, "Carry the crate up the stairs");
    const auto eb = embed(*b, "Carry the crate up the stairs");
    EXPECT_EQ(ea.vector, eb.vector) << name;
    EXPECT_EQ(static_cast<std::size_t>(ea.vector.size()), a->dim());
    EXPECT_FALSE(ea.truncated);
    std::string longer;
    for (int i = 0; i < 300; ++i) longer += "word" + std::to_string(i) + " ";
    EXPECT_TRUE(embed(*a, longer).truncated) << name;
    EXPECT_THROW(embed(*a, ""), ArgumentError);
  }
  EXPECT_THROW(make_backend("nope"), ConfigError);
}

TEST(Encoder, FrozenThenTrainableEqualsFullPass) {
  auto enc = make_backend(HashingBlockBackend::kName);
  enc->set_trainable_blocks(2);
  const std::string text = "Swim under the hull and tighten the bolt";
  auto states = enc->frozen_states(text);
  for (std::size_t k = enc->num_blocks() - enc->trainable_blocks(); k < enc->num_blocks(); ++k) {
    states.tokens = enc->blocks()[k].forward(states.tokens, nullptr);
  }
  const auto full = enc->encode(text);
  EXPECT_LT((states.tokens - full.tokens).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Encoder, TokenBlockGradientMatchesFiniteDifference) {
  std::mt19937_64 gen(5);
  TokenBlock block(8, 12);
  block.init(3, 0.5);
  const auto x = random_matrix(gen, 5, 8);
  const auto r = random_matrix(gen, 5, 8);
  auto loss = [&](const Eigen::MatrixXd& in) { return (block.forward(in, nullptr).array() * r.array()).sum(); };

  TokenBlock::Cache cache;
  block.forward(x, &cache);
  block.zero_grad();
  const auto dx = block.backward(cache, r);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < x.size(); i += 3) {
    Eigen::MatrixXd xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    EXPECT_LT(oracle::relative_error((loss(xp) - loss(xm)) / (2 * h), dx.data()[i]), 1e-5);
  }
  std::vector<TensorRef> params;
  block.collect("b", params);
  for (auto& t : params) {
    for (std::size_t i = 0; i < t.size; i += 7) {
      const double keep = t.data[i];
      t.data[i] = keep + h;
      const double lp = loss(x);
      t.data[i] = keep - h;
      const double lm = loss(x);
      t.data[i] = keep;
      EXPECT_LT(oracle::relative_error((lp - lm) / (2 * h), t.grad[i]), 1e-5) << t.name << "[" << i << "]";
    }
  }
}

TEST(Head, WidthsAreCapped) {
  const auto wide = HeadConfig::for_input(768);
  EXPECT_EQ(wide.hidden1, 512u);
  EXPECT_EQ(wide.hidden2, 256u);
  EXPECT_EQ(wide.hidden3, 128u);
  const auto narrow = HeadConfig::for_input(32);
  EXPECT_EQ(narrow.hidden1, 64u);
  EXPECT_EQ(narrow.hidden2, 64u);
  EXPECT_EQ(narrow.hidden3, 64u);
}

TEST(Head, EvalIsDeterministicAndRowIndependent) {
  ClassifierHead head(16, HeadConfig::for_input(16, 0.3), 1);
  std::mt19937_64 gen(2);
  const auto x = random_matrix(gen, 4, 16);
  const auto a = head.forward_eval(x);
  const auto b = head.forward_eval(x);
  EXPECT_EQ(a, b);
  const auto row = head.forward_eval(x.row(2));
  EXPECT_LT((row - a.row(2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Head, TrainModeNeedsTwoRows) {
  ClassifierHead head(8, HeadConfig::for_input(8, 0.0), 1);
  Rng rng(0);
  ClassifierHead::Cache cache;
  EXPECT_THROW(head.forward_train(Eigen::MatrixXd::Ones(1, 8), rng, cache), ArgumentError);
}

TEST(Head, GradientMatchesFiniteDifference) {
  std::mt19937_64 gen(9);
  ClassifierHead head(10, HeadConfig::for_input(10, 0.0), 4);
  const auto x = random_matrix(gen, 6, 10);
  const auto y = random_targets(gen, 6);
  const PosWeights w = {1.5, 2.0, 0.7, 1.0, 3.0, 1.2};
  auto loss = [&](const Eigen::MatrixXd& in) {
    Rng rng(1);
    ClassifierHead::Cache c;
    return weighted_bce_loss(head.forward_train(in, rng, c), y, w);
  };

  Rng rng(1);
  ClassifierHead::Cache cache;
  const auto logits = head.forward_train(x, rng, cache);
  head.zero_grad();
  const auto dx = head.backward(cache, weighted_bce_grad(logits, y, w));
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < x.size(); i += 4) {
    Eigen::MatrixXd xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    EXPECT_LT(oracle::relative_error((loss(xp) - loss(xm)) / (2 * h), dx.data()[i]), 1e-4);
  }
  for (auto& t : head.parameters()) {
    for (std::size_t i = 0; i < t.size; i += 11) {
      const double keep = t.data[i];
      t.data[i] = keep + h;
      const double lp = loss(x);
      t.data[i] = keep - h;
      const double lm = loss(x);
      t.data[i] = keep;
      // Parameters with a vanishing gradient are compared absolutely.
      const double fd = (lp - lm) / (2 * h);
      EXPECT_TRUE(oracle::relative_error(fd, t.grad[i]) < 1e-4 || std::fabs(fd - t.grad[i]) < 1e-7)
          << t.name << "[" << i << "] fd " << fd << " analytic " << t.grad[i];
    }
  }
}

TEST(Thresholds, TieIsPositive) {
  Probabilities p = {0.5, 0.4999999999, 0.5000000001, 0.0, 1.0, 0.5};
  const auto v = apply_thresholds(p, kDefaultThresholds);
  EXPECT_TRUE(v.test(Skill::kFly));
  EXPECT_FALSE(v.test(Skill::kLegs));
  EXPECT_TRUE(v.test(Skill::kWheels));
  EXPECT_FALSE(v.test(Skill::kHands));
  EXPECT_TRUE(v.test(Skill::kUnderWater));
  EXPECT_TRUE(v.test(Skill::kSurfaceWater));
}

TEST(Thresholds, Validation) {
  EXPECT_THROW(validate_thresholds(std::vector<double>{0.5, 0.5}), ArgumentError);
  EXPECT_THROW(validate_thresholds(std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5, 1.0}), ArgumentError);
  EXPECT_THROW(validate_thresholds(std::vector<double>{0.5, 0.5, 0.5, 0.5, 0.5, 0.0}), ArgumentError);
}

// Property: the ensemble probability is the member mean, lies between the
// member min and max, and is invariant to member order.
TEST(Ensemble, AveragingLaws) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = 1 + gen() % 5;
    std::vector<Probabilities> members(m);
    for (auto& p : members) {
      for (auto& v : p) v = u(gen);
    }
    const auto avg = average_probabilities(members);
    auto shuffled = members;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto avg2 = average_probabilities(shuffled);
    for (std::size_t k = 0; k < kNumSkills; ++k) {
      double lo = 1, hi = 0, sum = 0;
      for (const auto& p : members) {
        lo = std::min(lo, p[k]);
        hi = std::max(hi, p[k]);
        sum += p[k];
      }
      EXPECT_NEAR(avg[k], sum / static_cast<double>(m), 1e-12);
      EXPECT_GE(avg[k], lo - 1e-12);
      EXPECT_LE(avg[k], hi + 1e-12);
      EXPECT_NEAR(avg[k], avg2[k], 1e-12);
    }
    if (m == 1) EXPECT_EQ(avg, members[0]);
  }
  EXPECT_THROW(average_probabilities({}), ConfigError);
}

TEST(Ensemble, PredictionAveragesMembers) {
  EnsembleModel e({make_member("a", "hashing-bow", 1), make_member("b", "hashing-blocks", 2)});
  EXPECT_EQ(e.name(), "a+b");
  const auto r = predict_ensemble(e, "Drive the cart across the warehouse");
  ASSERT_EQ(r.member_probabilities.size(), 2u);
  for (std::size_t k = 0; k < kNumSkills; ++k) {
    EXPECT_NEAR(r.probabilities[k], 0.5 * (r.member_probabilities[0][k] + r.member_probabilities[1][k]), 1e-15);
  }
  EXPECT_EQ(r.skills, apply_thresholds(r.probabilities, e.thresholds()));
}

TEST(Bundle, RoundTripPreservesPredictions) {
  oracle::TempDir dir("bundle");
  auto m = make_member("m", "hashing-blocks", 3);
  m.set_thresholds({0.3, 0.4, 0.5, 0.6, 0.7, 0.45});
  save_bundle(m, dir / "m");
  const auto loaded = load_bundle(dir / "m");
  ASSERT_TRUE(loaded.is_member());
  const auto& lm = std::get<MemberModel>(loaded.model);
  EXPECT_EQ(lm.thresholds(), m.thresholds());
  const std::string text = "Fly a drone over the orchard";
  EXPECT_EQ(lm.probabilities(text), m.probabilities(text));

  EnsembleModel e({m, make_member("n", "hashing-bow", 4)}, {0.5, 0.5, 0.35, 0.5, 0.5, 0.5});
  save_bundle(e, dir / "e");
  const auto le = load_bundle(dir / "e");
  ASSERT_FALSE(le.is_member());
  EXPECT_EQ(le.as_ensemble().thresholds(), e.thresholds());
  EXPECT_EQ(predict_ensemble(le.as_ensemble(), text).probabilities, predict_ensemble(e, text).probabilities);

  const std::vector<std::filesystem::path> dirs = {dir / "m", dir / "e"};
  EXPECT_EQ(load_ensemble(dirs).members().size(), 3u);
}

TEST(Bundle, TamperingIsDetected) {
  oracle::TempDir dir("tamper");
  save_bundle(make_member("m", "hashing-bow", 1), dir / "m");
  std::filesystem::path blob;
  for (const auto& e : std::filesystem::directory_iterator(dir / "m")) {
    if (e.path().extension() == ".bin") blob = e.path();
  }
  ASSERT_FALSE(blob.empty());
  {
    std::fstream f(blob, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(16);
    f.put('\x7f');
  }
  EXPECT_THROW(load_bundle(dir / "m"), IntegrityError);
  EXPECT_THROW(load_bundle(dir / "missing"), IoError);

  save_bundle(make_member("m", "hashing-bow", 1), dir / "n");
  auto manifest = read_file(dir / "n" / "manifest.json");
  manifest.replace(manifest.find("\"m\""), 3, "\"q\"");
  write_file_atomic(dir / "n" / "manifest.json", manifest);
  EXPECT_THROW(load_bundle(dir / "n"), IntegrityError);
}
