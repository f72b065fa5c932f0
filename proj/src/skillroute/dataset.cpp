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

#include "skillroute/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"
#include "skillroute/rng.hpp"

namespace skillroute {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

const std::vector<std::string>& known_domains() {
  static const std::vector<std::string> domains = {
      "agriculture",
      "waterway operations",
      "underwater/marine",
      "outdoor/wilderness",
      "emergency/disaster",
      "urban infrastructure",
      "retail",
      "construction",
      "warehouse/logistics",
      "manufacturing",
      "office/commercial",
      "energy/utilities",
      "environmental/wildlife",
      "medical",
      "military/defense",
      "scientific research",
      "residential",
      "aerial operations",
      "mining/geology",
      "aerospace/space",
      "security/surveillance",
      "cross-domain generics",
      "other",
  };
  return domains;
}

bool is_known_domain(std::string_view domain) {
  const auto& d = known_domains();
  return std::find(d.begin(), d.end(), domain) != d.end();
}

namespace {

const std::set<std::string> kRecordKeys = {"id", "text", "skills", "domain", "source", "split"};

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

RecordValidation validate_task_record(const json& raw) {
  RecordValidation out;
  auto& errs = out.violations;
  if (!raw.is_object()) {
    errs.emplace_back("record must be an object");
    return out;
  }
  for (const auto& [key, _] : raw.items()) {
    if (!kRecordKeys.count(key)) errs.push_back("unknown key '" + key + "'");
  }

  TaskRecord rec;
  auto string_field = [&](const char* key, std::string& dst, bool required) {
    auto it = raw.find(key);
    if (it == raw.end()) {
      if (required) errs.push_back(std::string("missing field '") + key + "'");
      return;
    }
    if (!it->is_string()) {
      errs.push_back(std::string("field '") + key + "' must be a string");
      return;
    }
    dst = it->get<std::string>();
  };
  string_field("id", rec.id, true);
  string_field("text", rec.text, true);
  string_field("domain", rec.domain, true);
  string_field("source", rec.source, true);

  if (raw.contains("id") && raw["id"].is_string() && blank(rec.id)) {
    errs.emplace_back("id must be non-empty");
  }
  if (raw.contains("text") && raw["text"].is_string() && blank(rec.text)) {
    errs.emplace_back("text must be non-empty");
  }
  if (raw.contains("domain") && raw["domain"].is_string() && !is_known_domain(rec.domain)) {
    errs.push_back("unknown domain '" + rec.domain + "'");
  }
  if (raw.contains("source") && raw["source"].is_string() && blank(rec.source)) {
    errs.emplace_back("source must be non-empty");
  }

  auto sk = raw.find("skills");
  if (sk == raw.end()) {
    errs.emplace_back("missing field 'skills'");
  } else if (!sk->is_object()) {
    errs.emplace_back("field 'skills' must be an object");
  } else {
    bool skills_ok = true;
    for (const auto& [key, _] : sk->items()) {
      bool known = false;
      for (Skill s : kAllSkills) known = known || key == skill_key(s);
      if (!known) {
        errs.push_back("unknown skill key 'skills." + key + "'");
        skills_ok = false;
      }
    }
    for (Skill s : kAllSkills) {
      const std::string key(skill_key(s));
      auto it = sk->find(key);
      if (it == sk->end()) {
        errs.push_back("missing key 'skills." + key + "'");
        skills_ok = false;
      } else if (!it->is_boolean()) {
        errs.push_back("'skills." + key + "' must be a boolean");
        skills_ok = false;
      } else {
        rec.skills.set(s, it->get<bool>());
      }
    }
    if (skills_ok && rec.skills.none()) errs.emplace_back("label has no positive skill");
  }

  auto sp = raw.find("split");
  if (sp != raw.end() && !sp->is_null()) {
    if (!sp->is_string()) {
      errs.emplace_back("field 'split' must be a string or null");
    } else {
      const auto v = sp->get<std::string>();
      if (v == "train") {
        rec.split = Split::kTrain;
      } else if (v == "test") {
        rec.split = Split::kTest;
      } else if (v == "unassigned") {
        rec.split = Split::kUnassigned;
      } else {
        errs.push_back("unknown split value '" + v + "'");
      }
    }
  }

  if (errs.empty()) out.record = std::move(rec);
  return out;
}

TaskRecord parse_task_record(const json& raw) {
  auto v = validate_task_record(raw);
  if (!v.ok()) throw ValidationError(std::move(v.violations));
  return std::move(*v.record);
}

ordered_json skills_to_json(SkillVector v) {
  ordered_json out = ordered_json::object();
  for (Skill s : kAllSkills) out[std::string(skill_key(s))] = v.test(s);
  return out;
}

ordered_json to_json(const TaskRecord& r) {
  ordered_json j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["skills"] = skills_to_json(r.skills);
  j["domain"] = r.domain;
  j["source"] = r.source;
  if (r.split == Split::kUnassigned) {
    j["split"] = nullptr;
  } else {
    j["split"] = std::string(to_string(r.split));
  }
  return j;
}

std::string to_line(const TaskRecord& r) { return to_json(r).dump(); }

std::vector<TaskRecord> parse_dataset(std::string_view contents) {
  std::vector<TaskRecord> out;
  std::vector<std::string> errors;
  std::unordered_map<std::string, std::size_t> seen;  // id -> line number

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    auto line = contents.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;
    ++line_no;
    if (blank(line)) continue;

    json raw = json::parse(line, nullptr, false);
    if (raw.is_discarded()) {
      errors.push_back("line " + std::to_string(line_no) + ": malformed JSON");
      continue;
    }
    auto v = validate_task_record(raw);
    if (!v.ok()) {
      for (const auto& e : v.violations) errors.push_back("line " + std::to_string(line_no) + ": " + e);
      continue;
    }
    auto [it, inserted] = seen.emplace(v.record->id, line_no);
    if (!inserted) {
      errors.push_back("line " + std::to_string(line_no) + ": duplicate id '" + v.record->id +
                       "' (first seen on line " + std::to_string(it->second) + ")");
      continue;
    }
    out.push_back(std::move(*v.record));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return out;
}

std::vector<TaskRecord> read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path));
}

std::string serialize_dataset(std::span<const TaskRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += to_line(r);
    out.push_back('\n');
  }
  return out;
}

void write_dataset(std::span<const TaskRecord> records, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_dataset(records));
}

std::map<std::uint8_t, std::size_t> stratified_quotas(const std::map<std::uint8_t, std::size_t>& sizes,
                                                      std::size_t test_count) {
  std::size_t total = 0;
  for (const auto& [_, n] : sizes) total += n;

  struct Stratum {
    std::uint8_t mask;
    std::size_t size;
    std::size_t quota;
    std::size_t remainder;  // numerator of the fractional share, in units of 1/total
    std::size_t cap;
  };
  std::vector<Stratum> strata;
  std::size_t assigned = 0;
  for (const auto& [mask, n] : sizes) {
    const std::size_t num = test_count * n;
    Stratum s{mask, n, num / total, num % total, n >= 2 ? n - 1 : n};
    s.quota = std::min(s.quota, s.cap);
    assigned += s.quota;
    strata.push_back(s);
  }

  // Largest remainder first, multi-record strata before singletons, then mask.
  std::vector<std::size_t> order(strata.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = strata[a];
    const auto& y = strata[b];
    const bool xs = x.size >= 2, ys = y.size >= 2;
    if (xs != ys) return xs;
    if (x.remainder != y.remainder) return x.remainder > y.remainder;
    return x.mask < y.mask;
  });

  // The first pass hands out at most one seat per stratum; later passes only
  // run when caps bind.
  for (bool relaxed : {false, true}) {
    bool progress = true;
    while (assigned < test_count && progress) {
      progress = false;
      for (auto i : order) {
        if (assigned == test_count) break;
        auto& s = strata[i];
        const std::size_t cap = relaxed ? s.size : s.cap;
        if (s.quota < cap) {
          ++s.quota;
          ++assigned;
          progress = true;
        }
      }
    }
  }

  std::map<std::uint8_t, std::size_t> out;
  for (const auto& s : strata) out[s.mask] = s.quota;
  return out;
}

SplitResult stratified_split(std::span<const TaskRecord> records, std::size_t test_count,
                             std::uint64_t seed) {
  if (test_count == 0 || test_count >= records.size()) {
    throw ArgumentError("test_count must be in [1, " + std::to_string(records.size()) +
                        "), got " + std::to_string(test_count));
  }
  std::map<std::uint8_t, std::vector<std::size_t>> by_combo;
  for (std::size_t i = 0; i < records.size(); ++i) by_combo[records[i].skills.mask()].push_back(i);

  std::map<std::uint8_t, std::size_t> sizes;
  for (const auto& [mask, idx] : by_combo) sizes[mask] = idx.size();
  const auto quotas = stratified_quotas(sizes, test_count);

  Rng rng(seed);
  std::vector<bool> in_test(records.size(), false);
  for (auto& [mask, idx] : by_combo) {
    rng.shuffle(std::span(idx));
    const auto q = quotas.at(mask);
    for (std::size_t k = 0; k < q; ++k) in_test[idx[k]] = true;
  }

  SplitResult out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    TaskRecord r = records[i];
    if (in_test[i]) {
      r.split = Split::kTest;
      out.test.push_back(std::move(r));
    } else {
      r.split = Split::kTrain;
      out.train.push_back(std::move(r));
    }
  }
  return out;
}

DatasetStats dataset_stats(std::span<const TaskRecord> records) {
  DatasetStats s;
  s.total = records.size();
  for (const auto& r : records) {
    for (std::size_t i = 0; i < kNumSkills; ++i) {
      if (r.skills.test(i)) {
        ++s.positives[i];
      } else {
        ++s.negatives[i];
      }
    }
    ++s.combinations[r.skills.mask()];
    ++s.domains[r.domain];
    switch (r.split) {
      case Split::kTrain: ++s.train; break;
      case Split::kTest: ++s.test; break;
      case Split::kUnassigned: ++s.unassigned; break;
    }
  }
  return s;
}

ordered_json to_json(const DatasetStats& s) {
  ordered_json j;
  j["total"] = s.total;
  ordered_json per_skill = ordered_json::object();
  for (Skill k : kAllSkills) {
    per_skill[std::string(skill_key(k))] = {{"positive", s.positives[index_of(k)]},
                                            {"negative", s.negatives[index_of(k)]}};
  }
  j["skills"] = per_skill;
  j["distinct_combinations"] = s.distinct_combinations();
  ordered_json combos = ordered_json::object();
  for (const auto& [mask, n] : s.combinations) combos[SkillVector::from_mask(mask).combination_name()] = n;
  j["combinations"] = combos;
  ordered_json domains = ordered_json::object();
  for (const auto& [d, n] : s.domains) domains[d] = n;
  j["domains"] = domains;
  j["splits"] = {{"train", s.train}, {"test", s.test}, {"unassigned", s.unassigned}};
  return j;
}

std::string render_stats(const DatasetStats& s) {
  std::ostringstream os;
  char buf[128];
  os << "records: " << s.total << "  (train " << s.train << ", test " << s.test << ", unassigned "
     << s.unassigned << ")\n\n";
  std::snprintf(buf, sizeof buf, "%-14s %9s %9s\n", "skill", "positive", "negative");
  os << buf;
  for (Skill k : kAllSkills) {
    std::snprintf(buf, sizeof buf, "%-14s %9zu %9zu\n", std::string(skill_key(k)).c_str(),
                  s.positives[index_of(k)], s.negatives[index_of(k)]);
    os << buf;
  }
  os << "\nskill combinations: " << s.distinct_combinations() << "\n";
  std::vector<std::pair<std::uint8_t, std::size_t>> combos(s.combinations.begin(), s.combinations.end());
  std::stable_sort(combos.begin(), combos.end(), [](auto& a, auto& b) { return a.second > b.second; });
  for (const auto& [mask, n] : combos) {
    std::snprintf(buf, sizeof buf, "  %-40s %6zu\n", SkillVector::from_mask(mask).combination_name().c_str(), n);
    os << buf;
  }
  os << "\ndomains: " << s.domains.size() << "\n";
  for (const auto& [d, n] : s.domains) {
    std::snprintf(buf, sizeof buf, "  %-40s %6zu\n", d.c_str(), n);
    os << buf;
  }
  return os.str();
}

}  // namespace skillroute
