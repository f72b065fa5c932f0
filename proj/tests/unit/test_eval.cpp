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

#include <chrono>
#include <random>
#include <thread>

#include "oracles.hpp"
#include "skillroute/error.hpp"
#include "skillroute/fixtures.hpp"
#include "skillroute/metrics.hpp"

using namespace skillroute;

namespace {

std::vector<SkillVector> to_vectors(const std::vector<oracle::Bits>& bits) {
  std::vector<SkillVector> out;
  for (const auto& b : bits) out.push_back(SkillVector::from_bits(std::span<const int>(b)));
  return out;
}

SkillVector sv(std::initializer_list<std::string_view> names) { return skill_vector_from_names(names); }

}  // namespace

TEST(Metrics, HandCounts) {
  const std::vector<SkillVector> y = {sv({"fly"})};
  const std::vector<SkillVector> p = {sv({"fly", "legs"})};
  EXPECT_DOUBLE_EQ(hamming_score(y, p), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(exact_match(y, p), 0.0);
  EXPECT_DOUBLE_EQ(exact_match(y, y), 1.0);
  EXPECT_THROW(exact_match(y, {}), ArgumentError);
  EXPECT_THROW(exact_match({}, {}), ArgumentError);
}

TEST(Metrics, F1Formula) {
  // TP=2, FP=1, FN=1 on fly.
  const std::vector<SkillVector> y = {sv({"fly"}), sv({"fly"}), sv({"fly"}), sv({"legs"})};
  const std::vector<SkillVector> p = {sv({"fly"}), sv({"fly"}), sv({"legs"}), sv({"fly", "legs"})};
  const auto r = per_skill_prf(y, p);
  EXPECT_NEAR(r.f1[0], 4.0 / 6.0, 1e-15);
  EXPECT_EQ(r.confusion[0].tp, 2u);
  EXPECT_EQ(r.f1[index_of(Skill::kHands)], 1.0);
}

TEST(Metrics, OneDecimalFormatting) {
  EXPECT_EQ(format_percent(167.0 / 200.0), "83.5");
  EXPECT_EQ(format_percent(1156.0 / 1200.0), "96.3");
  EXPECT_EQ(format_f1(0.9413), "0.941");
  EXPECT_EQ(format_f1(1.0), "1.000");
}

// Property: every metric equals the brute-force reference, EM never exceeds
// Hamming, confusion cells sum to n, and Hamming is symmetric.
TEST(Metrics, OracleEquivalence) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 300;
    const auto y = oracle::random_bits(gen, n);
    const auto p = oracle::perturb(gen, y, 0.1 * (trial % 5));
    const auto ref = oracle::naive_metrics(y, p);
    const auto r = evaluate(to_vectors(y), to_vectors(p));
    EXPECT_NEAR(r.exact_match, ref.em, 1e-12);
    EXPECT_NEAR(r.hamming_score, ref.hamming, 1e-12);
    EXPECT_NEAR(r.macro_f1(), ref.macro_f1, 1e-12);
    EXPECT_LE(r.exact_match, r.hamming_score);
    for (int k = 0; k < 6; ++k) {
      EXPECT_NEAR(r.per_skill.precision[k], ref.precision[k], 1e-12);
      EXPECT_NEAR(r.per_skill.recall[k], ref.recall[k], 1e-12);
      EXPECT_NEAR(r.per_skill.f1[k], ref.f1[k], 1e-12);
      const auto& c = r.per_skill.confusion[k];
      EXPECT_EQ(c.tp + c.fp + c.fn + c.tn, n);
    }
    const auto swapped = evaluate(to_vectors(p), to_vectors(y));
    EXPECT_DOUBLE_EQ(swapped.hamming_score, r.hamming_score);
    for (int k = 0; k < 6; ++k) {
      EXPECT_DOUBLE_EQ(swapped.per_skill.precision[k], r.per_skill.recall[k]);
    }
  }
}

TEST(Metrics, ReportJsonRoundTrip) {
  std::mt19937_64 gen(4);
  const auto y = oracle::random_bits(gen, 50);
  const auto r = evaluate(to_vectors(y), to_vectors(oracle::perturb(gen, y, 0.1)));
  const auto back = metrics_report_from_json(to_json(r));
  EXPECT_EQ(back.n, r.n);
  EXPECT_DOUBLE_EQ(back.exact_match, r.exact_match);
  EXPECT_DOUBLE_EQ(back.macro_f1(), r.macro_f1());
}

TEST(Boundary, AttributionRules) {
  const std::vector<SkillVector> y = {sv({"legs"}), sv({"wheels"}), sv({"fly"}), sv({"hands"}), sv({"fly"})};
  const std::vector<SkillVector> p = {sv({"wheels"}), sv({"wheels", "legs"}), sv({"hands", "wheels"}), sv({"hands"}),
                                      SkillVector()};
  const auto r = mine_boundary_errors(y, p);
  EXPECT_EQ(r.total_errors, 4u);
  EXPECT_EQ(r.count(Skill::kLegs, Skill::kWheels), 2u);
  EXPECT_EQ(r.count(Skill::kWheels, Skill::kLegs), 2u);
  EXPECT_EQ(r.count(Skill::kLegs, Skill::kHands), 1u);  // singleton {legs}
  EXPECT_EQ(r.count(Skill::kFly, Skill::kHands), 1u);   // singleton {fly}
  EXPECT_EQ(r.skill_error_bits[index_of(Skill::kFly)], 2u);
  EXPECT_EQ(r.skill_error_bits[index_of(Skill::kWheels)], 2u);
}

// Property: per-skill bits sum to the total error-set size, pair counts never
// exceed the total, and attribution matches the subset rule.
TEST(Boundary, ConservationProperty) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    const auto y = oracle::random_bits(gen, n);
    const auto p = oracle::perturb(gen, y, 0.08);
    const auto r = mine_boundary_errors(to_vectors(y), to_vectors(p));
    std::size_t bits = 0, errored = 0;
    std::array<std::size_t, 15> pairs{};
    for (std::size_t i = 0; i < n; ++i) {
      int diff = 0;
      for (int k = 0; k < 6; ++k) diff |= (y[i][k] != p[i][k]) << k;
      bits += static_cast<std::size_t>(__builtin_popcount(diff));
      if (diff == 0) continue;
      ++errored;
      std::size_t idx = 0;
      for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b, ++idx) {
          if ((diff & ~((1 << a) | (1 << b))) == 0) ++pairs[idx];
        }
      }
    }
    std::size_t sum_bits = 0;
    for (auto b : r.skill_error_bits) sum_bits += b;
    EXPECT_EQ(sum_bits, bits);
    EXPECT_EQ(r.total_errors, errored);
    EXPECT_EQ(r.pair_counts, pairs);
    for (auto c : r.pair_counts) EXPECT_LE(c, r.total_errors);
  }
}

TEST(Boundary, JsonRoundTrip) {
  const std::vector<SkillVector> y = {sv({"legs"})};
  const std::vector<SkillVector> p = {sv({"wheels"})};
  const auto r = mine_boundary_errors(y, p);
  const auto back = boundary_report_from_json(to_json(r));
  EXPECT_EQ(back.pair_counts, r.pair_counts);
  EXPECT_EQ(back.total_errors, 1u);
}

TEST(Latency, StubTiming) {
  const std::vector<std::string> texts(12, "x");
  std::size_t calls = 0;
  const auto r = measure_latency(
      [&](const std::string&) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        return CallOutcome{};
      },
      texts, 3);
  EXPECT_EQ(calls, 15u);
  EXPECT_EQ(r.count, 12u);
  EXPECT_GE(r.median_ms, 4.5);
  EXPECT_LT(r.median_ms, 50.0);
  EXPECT_LE(r.min_ms, r.median_ms);
  EXPECT_LE(r.median_ms, r.p95_ms);
  EXPECT_LE(r.p95_ms, r.max_ms);
}

TEST(Latency, FailuresAndExclusions) {
  const std::vector<std::string> texts = {"a", "b", "c", "d"};
  const auto r = measure_latency(
      [](const std::string& t) {
        if (t == "b") throw std::runtime_error("boom");
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        return CallOutcome{true, 0.02};
      },
      texts, 0);
  EXPECT_EQ(r.failed, 1u);
  EXPECT_EQ(r.count, 3u);
  EXPECT_LT(r.median_ms, 15.0);
  EXPECT_THROW(measure_latency([](const std::string&) { return CallOutcome{false, 0}; }, texts, 0), Error);
  EXPECT_THROW(measure_latency([](const std::string&) { return CallOutcome{}; }, {}, 0), ArgumentError);
}

TEST(Compare, SortedByExactMatch) {
  MetricsReport a, b, c;
  a.exact_match = 0.7;
  b.exact_match = 0.835;
  c.exact_match = 0.5;
  const auto table = compare_models({{"alpha", a}, {"ensemble", b}, {"gamma", c}});
  const auto pe = table.find("ensemble"), pa = table.find("alpha"), pg = table.find("gamma");
  EXPECT_LT(pe, pa);
  EXPECT_LT(pa, pg);
  EXPECT_NE(table.find("83.5"), std::string::npos);
  EXPECT_NE(table.find("Per-skill F1"), std::string::npos);
}

TEST(Predictions, RoundTripAndEvaluate) {
  const auto fx = fixtures::make_fixture(2, 4);
  std::vector<PredictionRecord> preds;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    PredictionRecord p{fx[i], i % 4 == 0 ? SkillVector::from_mask(0x3f) : fx[i].skills, {}};
    p.probabilities = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    preds.push_back(p);
  }
  const auto back = parse_predictions(serialize_predictions(preds));
  ASSERT_EQ(back.size(), preds.size());
  EXPECT_EQ(back[3].predicted, preds[3].predicted);
  EXPECT_EQ(back[3].probabilities, preds[3].probabilities);
  const auto r = evaluate_predictions(fx, back);
  EXPECT_NEAR(r.exact_match, 18.0 / 24.0, 1e-12);
  EXPECT_THROW(evaluate_predictions(fx, std::span(back).first(5)), ValidationError);
}
