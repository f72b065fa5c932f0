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

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "skillroute/dataset.hpp"
#include "skillroute/error.hpp"
#include "skillroute/fixtures.hpp"
#include "skillroute/hashing.hpp"
#include "skillroute/skills.hpp"

using namespace skillroute;
using nlohmann::json;

namespace {

json line(const std::string& id, std::initializer_list<std::string_view> skills, const char* split = nullptr) {
  json s = json::object();
  for (Skill k : kAllSkills) s[std::string(skill_key(k))] = false;
  for (auto n : skills) s[std::string(n)] = true;
  json j{{"id", id}, {"text", "do " + id}, {"skills", s}, {"domain", "agriculture"}, {"source", "manual"}};
  j["split"] = split ? json(split) : json(nullptr);
  return j;
}

std::vector<TaskRecord> random_dataset(std::mt19937_64& gen, std::size_t n, int combos) {
  std::uniform_int_distribution<int> pick(1, combos);
  std::vector<TaskRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    TaskRecord r;
    r.id = "r" + std::to_string(i);
    r.text = "task " + std::to_string(i);
    r.skills = SkillVector::from_mask(static_cast<std::uint8_t>(pick(gen)));
    r.domain = "other";
    r.source = "test";
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Skills, CanonicalOrderAndKeys) {
  const std::vector<std::string> keys = {"fly", "legs", "wheels", "hands", "under_water", "surface_water"};
  for (std::size_t i = 0; i < kNumSkills; ++i) EXPECT_EQ(skill_key(kAllSkills[i]), keys[i]);
}

TEST(Skills, ParseIsLenient) {
  EXPECT_EQ(parse_skill("Under Water"), Skill::kUnderWater);
  EXPECT_EQ(parse_skill("surface-water"), Skill::kSurfaceWater);
  EXPECT_EQ(parse_skill("FLY"), Skill::kFly);
  EXPECT_FALSE(parse_skill("swim").has_value());
}

TEST(Skills, UnknownNamesAreReported) {
  try {
    skill_vector_from_names({"fly", "teleport", "swim"});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
}

TEST(Skills, SubsetMatchesBitwiseDefinition) {
  for (int a = 0; a < 64; ++a) {
    for (int b = 0; b < 64; ++b) {
      const auto va = SkillVector::from_mask(static_cast<std::uint8_t>(a));
      const auto vb = SkillVector::from_mask(static_cast<std::uint8_t>(b));
      EXPECT_EQ(va.subset_of(vb), oracle::naive_subset(a, b));
    }
  }
}

TEST(Skills, CombinationNameAndPairs) {
  EXPECT_EQ(skill_vector_from_names({"hands", "fly"}).combination_name(), "fly+hands");
  EXPECT_EQ(SkillVector().combination_name(), "none");
  EXPECT_EQ(skill_pairs().size(), 15u);
  std::set<std::size_t> seen;
  for (const auto& [a, b] : skill_pairs()) {
    EXPECT_LT(index_of(a), index_of(b));
    seen.insert(pair_index(a, b));
    EXPECT_EQ(pair_index(a, b), pair_index(b, a));
  }
  EXPECT_EQ(seen.size(), 15u);
}

TEST(Dataset, ValidLineRoundTrips) {
  const auto rec = parse_task_record(line("t1", {"legs", "hands"}, "train"));
  EXPECT_EQ(rec.skills, skill_vector_from_names({"legs", "hands"}));
  EXPECT_EQ(rec.split, Split::kTrain);
  const auto again = parse_task_record(json::parse(to_line(rec)));
  EXPECT_EQ(rec, again);
}

TEST(Dataset, AllZeroLabelIsInvalid) {
  const auto v = validate_task_record(line("t1", {}));
  ASSERT_FALSE(v.ok());
  EXPECT_EQ(v.violations, std::vector<std::string>{"label has no positive skill"});
}

TEST(Dataset, EveryViolationIsReported) {
  auto j = line("t1", {"fly"});
  j["text"] = "   ";
  j["extra"] = 1;
  j["skills"].erase("wheels");
  j["domain"] = "moon base";
  const auto v = validate_task_record(j);
  ASSERT_FALSE(v.ok());
  const std::set<std::string> got(v.violations.begin(), v.violations.end());
  EXPECT_TRUE(got.count("text must be non-empty"));
  EXPECT_TRUE(got.count("unknown key 'extra'"));
  EXPECT_TRUE(got.count("missing key 'skills.wheels'"));
  EXPECT_TRUE(got.count("unknown domain 'moon base'"));
}

TEST(Dataset, NonBooleanSkillRejected) {
  auto j = line("t1", {"fly"});
  j["skills"]["legs"] = 1;
  EXPECT_FALSE(validate_task_record(j).ok());
}

TEST(Dataset, ParseReportsLineNumbersAndDuplicates) {
  const std::string text = line("a", {"fly"}).dump() + "\n\n{oops\n" + line("a", {"legs"}).dump() + "\n";
  try {
    parse_dataset(text);
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 2u);
    EXPECT_EQ(e.violations()[0], "line 3: malformed JSON");
    EXPECT_NE(e.violations()[1].find("line 4: duplicate id 'a'"), std::string::npos);
  }
}

TEST(Dataset, SerializeParseIsIdentity) {
  const auto fx = fixtures::make_fixture(3, 9);
  const auto text = serialize_dataset(fx);
  EXPECT_EQ(parse_dataset(text), fx);
  EXPECT_EQ(serialize_dataset(parse_dataset(text)), text);
}

TEST(Dataset, WriteReadFile) {
  oracle::TempDir dir("core");
  const auto fx = fixtures::make_fixture(2, 1);
  write_dataset(fx, dir / "d.jsonl");
  EXPECT_EQ(read_dataset(dir / "d.jsonl"), fx);
  EXPECT_THROW(read_dataset(dir / "missing.jsonl"), IoError);
}

TEST(Split, FixtureGetsTwoPerCombination) {
  const auto fx = fixtures::make_fixture(10, 3);
  ASSERT_EQ(fx.size(), 120u);
  const auto s = stratified_split(fx, 24, 5);
  ASSERT_EQ(s.test.size(), 24u);
  ASSERT_EQ(s.train.size(), 96u);
  std::map<std::uint8_t, int> per;
  for (const auto& r : s.test) ++per[r.skills.mask()];
  EXPECT_EQ(per.size(), 12u);
  for (const auto& [m, n] : per) EXPECT_EQ(n, 2) << SkillVector::from_mask(m).combination_name();
  for (const auto& r : s.test) EXPECT_EQ(r.split, Split::kTest);
  for (const auto& r : s.train) EXPECT_EQ(r.split, Split::kTrain);
}

TEST(Split, FullScaleCounts) {
  std::mt19937_64 gen(11);
  const auto d = random_dataset(gen, 1261, 23);
  const auto s = stratified_split(d, 200, 0);
  EXPECT_EQ(s.train.size(), 1061u);
  EXPECT_EQ(s.test.size(), 200u);
}

TEST(Split, SingleStratum) {
  std::vector<TaskRecord> d;
  for (int i = 0; i < 10; ++i) d.push_back({"r" + std::to_string(i), "t", SkillVector::from_mask(1), "other", "x", {}});
  const auto s = stratified_split(d, 2, 0);
  EXPECT_EQ(s.train.size(), 8u);
  EXPECT_EQ(s.test.size(), 2u);
}

TEST(Split, RejectsBadCounts) {
  const auto fx = fixtures::make_fixture(1, 0);
  EXPECT_THROW(stratified_split(fx, 0, 0), ArgumentError);
  EXPECT_THROW(stratified_split(fx, fx.size(), 0), ArgumentError);
}

// Property: every stratum's test share is within one record of its
// proportional quota, multi-record strata keep a train record, the split is
// a partition, and it is a pure function of the seed.
TEST(Split, StratificationProperty) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + gen() % 300;
    const int combos = 1 + static_cast<int>(gen() % 40);
    const auto d = random_dataset(gen, n, std::min(combos, 63));
    const std::size_t test_count = 1 + gen() % (n - 1);
    const auto s = stratified_split(d, test_count, trial);
    ASSERT_EQ(s.test.size(), test_count);
    ASSERT_EQ(s.train.size() + s.test.size(), n);

    std::map<std::uint8_t, double> size, in_test, in_train;
    for (const auto& r : d) size[r.skills.mask()] += 1;
    for (const auto& r : s.test) in_test[r.skills.mask()] += 1;
    for (const auto& r : s.train) in_train[r.skills.mask()] += 1;
    bool capped = false;
    for (const auto& [m, sz] : size) capped = capped || (sz >= 2 && sz * test_count / n > sz - 1);
    for (const auto& [m, sz] : size) {
      const double share = sz * static_cast<double>(test_count) / static_cast<double>(n);
      if (!capped) EXPECT_LE(std::fabs(in_test[m] - share), 1.0 + 1e-9) << "trial " << trial;
      if (sz >= 2 && test_count <= n - size.size()) EXPECT_GE(in_train[m], 1.0);
    }
    std::set<std::string> ids;
    for (const auto& r : s.train) ids.insert(r.id);
    for (const auto& r : s.test) ids.insert(r.id);
    EXPECT_EQ(ids.size(), n);

    const auto again = stratified_split(d, test_count, trial);
    EXPECT_EQ(again.test, s.test);
  }
}

TEST(Split, QuotasSumToTestCount) {
  const std::map<std::uint8_t, std::size_t> sizes = {{1, 7}, {2, 3}, {3, 1}, {4, 13}};
  for (std::size_t t = 1; t < 24; ++t) {
    std::size_t sum = 0;
    for (const auto& [m, q] : stratified_quotas(sizes, t)) sum += q;
    EXPECT_EQ(sum, t);
  }
}

TEST(Stats, CountsSumToTotal) {
  std::vector<TaskRecord> d = {
      parse_task_record(line("a", {"fly"})),
      parse_task_record(line("b", {"fly", "hands"}, "test")),
      parse_task_record(line("c", {"legs"}, "train")),
  };
  const auto s = dataset_stats(d);
  EXPECT_EQ(s.total, 3u);
  EXPECT_EQ(s.positives[index_of(Skill::kFly)], 2u);
  EXPECT_EQ(s.negatives[index_of(Skill::kFly)], 1u);
  for (std::size_t k = 0; k < kNumSkills; ++k) EXPECT_EQ(s.positives[k] + s.negatives[k], 3u);
  std::size_t combos = 0;
  for (const auto& [m, n] : s.combinations) combos += n;
  EXPECT_EQ(combos, 3u);
  EXPECT_EQ(s.train + s.test + s.unassigned, 3u);
  EXPECT_NE(render_stats(s).find("skill combinations: 3"), std::string::npos);
}

TEST(Hashing, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hashing, AtomicWriteReplaces) {
  oracle::TempDir dir("hash");
  write_file_atomic(dir / "f", "one");
  write_file_atomic(dir / "f", "two");
  EXPECT_EQ(read_file(dir / "f"), "two");
  EXPECT_FALSE(std::filesystem::exists(dir / "f.tmp"));
}
