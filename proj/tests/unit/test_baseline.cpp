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

#include <atomic>

#include "oracles.hpp"
#include "parser_corpus.hpp"
#include "skillroute/baseline.hpp"
#include "skillroute/error.hpp"
#include "skillroute/fixtures.hpp"

using namespace skillroute;
using nlohmann::json;

namespace {

const Sleeper kNoSleep = [](double) {};

std::string answer_for(SkillVector v) { return skills_to_json(v).dump(); }

// Answers with the true label for the task named in the prompt, except for a
// few scripted failure modes keyed by record position.
class ScriptedOracle : public ChatProvider {
 public:
  explicit ScriptedOracle(std::vector<TaskRecord> records) : records_(std::move(records)) {}
  std::string name() const override { return "scripted"; }
  std::string complete(const ChatRequest& req) override {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      if (req.user.find("Task:\n" + records_[i].text + "\n") == std::string::npos) continue;
      if (i % 7 == 3) return "I would say legs, probably.";
      if (i % 11 == 5) throw CallFailure("HTTP 401", false);
      return "Answer:\n" + answer_for(records_[i].skills);
    }
    return "?";
  }

 private:
  std::vector<TaskRecord> records_;
};

}  // namespace

TEST(Prompt, TemplateIsVersionedAndHashed) {
  const auto p = build_prompt("Carry the crate upstairs");
  EXPECT_NE(p.find("Carry the crate upstairs"), std::string::npos);
  EXPECT_EQ(p.find("{{TASK}}"), std::string::npos);
  for (Skill s : kAllSkills) EXPECT_NE(p.find(std::string(skill_key(s))), std::string::npos);
  EXPECT_EQ(prompt_template_hash().size(), 64u);
  EXPECT_EQ(std::string(kPromptTemplateId), "zero-shot-v1");
  EXPECT_THROW(build_prompt("   "), ArgumentError);
}

TEST(Parser, Corpus) {
  const auto& corpus = oracle::parser_corpus();
  ASSERT_GE(corpus.size(), 20u);
  for (const auto& c : corpus) {
    if (c.mask >= 0) {
      EXPECT_EQ(parse_skill_response(c.raw).mask(), c.mask) << c.raw;
    } else {
      try {
        parse_skill_response(c.raw);
        ADD_FAILURE() << "accepted: " << c.raw;
      } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(c.error), std::string::npos) << e.what();
        EXPECT_EQ(e.raw(), c.raw);
      }
    }
  }
}

// Property: serializing any label with any of the accepted value spellings
// and wrapping it in prose parses back to the same label.
TEST(Parser, RoundTripsAllLabels) {
  const std::vector<std::pair<std::string, std::string>> spellings = {
      {"true", "false"}, {"True", "False"}, {"1", "0"}, {"\"true\"", "\"False\""}, {"1.0", "0.0"}};
  for (int m = 0; m < 64; ++m) {
    for (const auto& [t, f] : spellings) {
      std::string body = "{";
      for (Skill s : kAllSkills) {
        if (body.size() > 1) body += ", ";
        body += "\"" + std::string(skill_key(s)) + "\": " + ((m >> index_of(s)) & 1 ? t : f);
      }
      body += "}";
      EXPECT_EQ(parse_skill_response("Here you go: " + body + " Done.").mask(), m) << body;
    }
  }
}

TEST(Config, Validation) {
  BaselineConfig c;
  c.provider.name = "p";
  EXPECT_NO_THROW(c.validate());
  c.template_id = "few-shot";
  EXPECT_THROW(c.validate(), ConfigError);
  c.template_id = kPromptTemplateId;
  c.parallelism = 0;
  EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Run, FailuresScoreAsAllZeroAndAreCountedSeparately) {
  const auto fx = fixtures::make_fixture(3, 6);
  ScriptedOracle provider(fx);
  BaselineConfig c;
  c.provider.name = "scripted";
  c.parallelism = 3;
  const auto run = run_baseline(c, fx, provider, kNoSleep);

  std::size_t parse = 0, transport = 0, exact = 0;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const bool p = i % 7 == 3;
    const bool t = !p && i % 11 == 5;
    parse += p;
    transport += t;
    exact += !p && !t;
    EXPECT_EQ(run.exchanges[i].task_id, fx[i].id);
    if (p || t) {
      EXPECT_TRUE(run.predictions[i].predicted.none());
    } else {
      EXPECT_EQ(run.predictions[i].predicted, fx[i].skills);
    }
    EXPECT_EQ(!run.exchanges[i].error.empty(), t);
  }
  EXPECT_EQ(run.parse_errors, parse);
  EXPECT_EQ(run.transport_failures, transport);
  EXPECT_NEAR(run.report.exact_match, static_cast<double>(exact) / fx.size(), 1e-12);
  EXPECT_EQ(run.template_hash, prompt_template_hash());

  const auto summary = run_summary_json(run);
  EXPECT_EQ(summary["parse_errors"], parse);
  EXPECT_EQ(summary["transport_failures"], transport);
}

TEST(Run, RescoreIsBitExact) {
  const auto fx = fixtures::make_fixture(2, 8);
  ScriptedOracle provider(fx);
  BaselineConfig c;
  c.provider.name = "scripted";
  const auto run = run_baseline(c, fx, provider, kNoSleep);

  oracle::TempDir dir("baseline");
  write_exchanges(run.exchanges, dir / "ex.jsonl");
  const auto back = read_exchanges(dir / "ex.jsonl");
  EXPECT_EQ(serialize_exchanges(back), serialize_exchanges(run.exchanges));
  const auto rescored = rescore_exchanges(back);
  ASSERT_EQ(rescored.size(), run.predictions.size());
  for (std::size_t i = 0; i < rescored.size(); ++i) EXPECT_EQ(rescored[i], run.predictions[i].predicted);
}

TEST(Run, RetriesAreRecorded) {
  const auto fx = fixtures::make_fixture(1, 2);
  std::atomic<int> calls{0};
  CannedProvider flaky("flaky", [&](const ChatRequest& r, std::size_t) -> std::string {
    if (calls++ % 2 == 0) throw CallFailure("HTTP 429", true, 0.25);
    for (const auto& rec : fx) {
      if (r.user.find("Task:\n" + rec.text + "\n") != std::string::npos) return answer_for(rec.skills);
    }
    return "";
  });
  BaselineConfig c;
  c.provider.name = "flaky";
  c.parallelism = 1;
  c.base_backoff_seconds = 0.1;
  const auto run = run_baseline(c, fx, flaky, kNoSleep);
  EXPECT_DOUBLE_EQ(run.report.exact_match, 1.0);
  for (const auto& e : run.exchanges) {
    EXPECT_EQ(e.attempts, 2);
    EXPECT_DOUBLE_EQ(e.backoff_seconds, 0.25);
  }
}

TEST(Exchanges, MalformedLinesRejected) {
  EXPECT_THROW(parse_exchanges("{not json}\n"), ValidationError);
  EXPECT_THROW(parse_exchanges("{\"task_id\": 3}\n"), ValidationError);
}
