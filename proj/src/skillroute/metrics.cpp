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

#include "skillroute/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"

namespace skillroute {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void check_inputs(std::span<const SkillVector> truths, std::span<const SkillVector> preds) {
  if (truths.size() != preds.size()) {
    throw ArgumentError("length mismatch: " + std::to_string(truths.size()) + " truths vs " +
                        std::to_string(preds.size()) + " predictions");
  }
  if (truths.empty()) throw ArgumentError("metrics need at least one task");
}

double ratio_or_one(std::size_t num, std::size_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double exact_match(std::span<const SkillVector> truths, std::span<const SkillVector> preds) {
  check_inputs(truths, preds);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) hits += truths[i] == preds[i];
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

double hamming_score(std::span<const SkillVector> truths, std::span<const SkillVector> preds) {
  check_inputs(truths, preds);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    correct += kNumSkills - static_cast<std::size_t>(__builtin_popcount(truths[i].mask() ^ preds[i].mask()));
  }
  return static_cast<double>(correct) / static_cast<double>(kNumSkills * truths.size());
}

PerSkillPrf per_skill_prf(std::span<const SkillVector> truths, std::span<const SkillVector> preds) {
  check_inputs(truths, preds);
  PerSkillPrf out;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    for (std::size_t s = 0; s < kNumSkills; ++s) {
      const bool t = truths[i].test(s);
      const bool p = preds[i].test(s);
      auto& c = out.confusion[s];
      if (t && p) {
        ++c.tp;
      } else if (!t && p) {
        ++c.fp;
      } else if (t && !p) {
        ++c.fn;
      } else {
        ++c.tn;
      }
    }
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < kNumSkills; ++s) {
    const auto& c = out.confusion[s];
    out.precision[s] = ratio_or_one(c.tp, c.tp + c.fp);
    out.recall[s] = ratio_or_one(c.tp, c.tp + c.fn);
    out.f1[s] = ratio_or_one(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    sum += out.f1[s];
  }
  out.macro_f1 = sum / static_cast<double>(kNumSkills);
  return out;
}

MetricsReport evaluate(std::span<const SkillVector> truths, std::span<const SkillVector> preds) {
  MetricsReport r;
  r.n = truths.size();
  r.exact_match = exact_match(truths, preds);
  r.hamming_score = hamming_score(truths, preds);
  r.per_skill = per_skill_prf(truths, preds);
  return r;
}

ordered_json to_json(const MetricsReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["exact_match"] = r.exact_match;
  j["hamming_score"] = r.hamming_score;
  j["macro_f1"] = r.per_skill.macro_f1;
  ordered_json skills = ordered_json::object();
  for (Skill s : kAllSkills) {
    const auto i = index_of(s);
    const auto& c = r.per_skill.confusion[i];
    skills[std::string(skill_key(s))] = {{"precision", r.per_skill.precision[i]},
                                         {"recall", r.per_skill.recall[i]},
                                         {"f1", r.per_skill.f1[i]},
                                         {"tp", c.tp},
                                         {"fp", c.fp},
                                         {"fn", c.fn},
                                         {"tn", c.tn}};
  }
  j["per_skill"] = skills;
  j["f1_convention"] = "a skill absent from both truth and prediction scores precision = recall = F1 = 1.0";
  return j;
}

MetricsReport metrics_report_from_json(const json& j) {
  MetricsReport r;
  try {
    r.n = j.at("n").get<std::size_t>();
    r.exact_match = j.at("exact_match").get<double>();
    r.hamming_score = j.at("hamming_score").get<double>();
    r.per_skill.macro_f1 = j.at("macro_f1").get<double>();
    for (Skill s : kAllSkills) {
      const auto& e = j.at("per_skill").at(std::string(skill_key(s)));
      const auto i = index_of(s);
      r.per_skill.precision[i] = e.at("precision").get<double>();
      r.per_skill.recall[i] = e.at("recall").get<double>();
      r.per_skill.f1[i] = e.at("f1").get<double>();
      r.per_skill.confusion[i] = {e.at("tp").get<std::size_t>(), e.at("fp").get<std::size_t>(),
                                  e.at("fn").get<std::size_t>(), e.at("tn").get<std::size_t>()};
    }
  } catch (const json::exception& e) {
    throw ValidationError({std::string("malformed metrics report: ") + e.what()});
  }
  return r;
}

std::size_t BoundaryReport::count(Skill a, Skill b) const { return pair_counts[pair_index(a, b)]; }

BoundaryReport mine_boundary_errors(std::span<const SkillVector> truths, std::span<const SkillVector> preds) {
  check_inputs(truths, preds);
  BoundaryReport r;
  const auto& pairs = skill_pairs();
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const std::uint8_t diff = truths[i].mask() ^ preds[i].mask();
    if (diff == 0) continue;
    ++r.total_errors;
    for (std::size_t s = 0; s < kNumSkills; ++s) r.skill_error_bits[s] += (diff >> s) & 1u;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const std::uint8_t pm = static_cast<std::uint8_t>((1u << index_of(pairs[p].first)) |
                                                        (1u << index_of(pairs[p].second)));
      if ((diff & pm) == diff) ++r.pair_counts[p];
    }
  }
  return r;
}

ordered_json to_json(const BoundaryReport& r) {
  ordered_json j;
  j["total_errors"] = r.total_errors;
  ordered_json pairs = ordered_json::array();
  for (std::size_t p = 0; p < skill_pairs().size(); ++p) {
    const auto& [a, b] = skill_pairs()[p];
    pairs.push_back({{"a", skill_key(a)}, {"b", skill_key(b)}, {"count", r.pair_counts[p]}});
  }
  j["pairs"] = pairs;
  ordered_json bits = ordered_json::object();
  for (Skill s : kAllSkills) bits[std::string(skill_key(s))] = r.skill_error_bits[index_of(s)];
  j["skill_error_bits"] = bits;
  return j;
}

BoundaryReport boundary_report_from_json(const json& j) {
  BoundaryReport r;
  try {
    r.total_errors = j.at("total_errors").get<std::size_t>();
    for (const auto& e : j.at("pairs")) {
      auto a = parse_skill(e.at("a").get<std::string>());
      auto b = parse_skill(e.at("b").get<std::string>());
      if (!a || !b) throw ValidationError({"unknown skill in boundary pair"});
      r.pair_counts[pair_index(*a, *b)] = e.at("count").get<std::size_t>();
    }
    if (j.contains("skill_error_bits")) {
      for (Skill s : kAllSkills) {
        r.skill_error_bits[index_of(s)] = j["skill_error_bits"].value(std::string(skill_key(s)), std::size_t{0});
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError({std::string("malformed boundary report: ") + e.what()});
  }
  return r;
}

void summarize_latency(LatencyReport& r) {
  r.count = r.samples_ms.size();
  if (r.samples_ms.empty()) return;
  auto sorted = r.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  r.min_ms = sorted.front();
  r.max_ms = sorted.back();
  r.median_ms = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  r.p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
  r.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
}

LatencyReport measure_latency(const TimedCall& call, std::span<const std::string> texts, std::size_t warmup) {
  if (texts.empty()) throw ArgumentError("latency measurement needs at least one text");
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < warmup; ++i) {
    try {
      (void)call(texts[i % texts.size()]);
    } catch (const std::exception&) {
    }
  }
  LatencyReport r;
  for (const auto& text : texts) {
    const auto start = clock::now();
    CallOutcome outcome;
    try {
      outcome = call(text);
    } catch (const std::exception&) {
      outcome.ok = false;
    }
    const std::chrono::duration<double, std::milli> elapsed = clock::now() - start;
    if (!outcome.ok) {
      ++r.failed;
      continue;
    }
    r.samples_ms.push_back(std::max(0.0, elapsed.count() - outcome.excluded_seconds * 1000.0));
  }
  if (r.samples_ms.empty()) throw Error(ErrorKind::kArgument, "no successful samples");
  summarize_latency(r);
  return r;
}

ordered_json to_json(const LatencyReport& r) {
  ordered_json j;
  j["count"] = r.count;
  j["failed"] = r.failed;
  j["median_ms"] = r.median_ms;
  j["p95_ms"] = r.p95_ms;
  j["mean_ms"] = r.mean_ms;
  j["min_ms"] = r.min_ms;
  j["max_ms"] = r.max_ms;
  j["batching"] = r.batching;
  j["samples_ms"] = r.samples_ms;
  return j;
}

std::string format_fixed(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The epsilon absorbs binary representation error, e.g. 83.4999999 for 167/200.
  const double scaled = value * scale;
  const double rounded = std::copysign(std::floor(std::fabs(scaled) + 0.5 + 1e-9), scaled) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
  return buf;
}

std::string format_percent(double rate) { return format_fixed(rate * 100.0, 1); }
std::string format_f1(double f1) { return format_fixed(f1, 3); }

std::string compare_models(std::vector<std::pair<std::string, MetricsReport>> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return a.second.exact_match > b.second.exact_match; });
  std::size_t name_w = 5;
  for (const auto& [name, _] : reports) name_w = std::max(name_w, name.size());

  std::ostringstream os;
  char buf[512];
  const int w = static_cast<int>(name_w);
  std::snprintf(buf, sizeof buf, "%-*s  %15s  %17s  %8s\n", w, "Model", "Exact Match (%)", "Hamming Score (%)",
                "Macro F1");
  os << buf;
  os << std::string(name_w + 2 + 15 + 2 + 17 + 2 + 8, '-') << "\n";
  for (const auto& [name, r] : reports) {
    std::snprintf(buf, sizeof buf, "%-*s  %15s  %17s  %8s\n", w, name.c_str(), format_percent(r.exact_match).c_str(),
                  format_percent(r.hamming_score).c_str(), format_f1(r.macro_f1()).c_str());
    os << buf;
  }

  os << "\nPer-skill F1\n";
  std::snprintf(buf, sizeof buf, "%-14s", "Skill");
  os << buf;
  std::vector<int> col_w;
  for (const auto& [name, _] : reports) {
    col_w.push_back(static_cast<int>(std::max<std::size_t>(name.size(), 5)));
    std::snprintf(buf, sizeof buf, "  %*s", col_w.back(), name.c_str());
    os << buf;
  }
  os << "\n";
  for (Skill s : kAllSkills) {
    std::snprintf(buf, sizeof buf, "%-14s", std::string(skill_label(s)).c_str());
    os << buf;
    for (std::size_t m = 0; m < reports.size(); ++m) {
      std::snprintf(buf, sizeof buf, "  %*s", col_w[m], format_f1(reports[m].second.per_skill.f1[index_of(s)]).c_str());
      os << buf;
    }
    os << "\n";
  }
  os << "\nF1 convention: a skill absent from both truth and prediction scores 1.0.\n";
  return os.str();
}

ordered_json to_json(const PredictionRecord& p) {
  auto j = to_json(p.record);
  j["predicted_skills"] = skills_to_json(p.predicted);
  j["probabilities"] = p.probabilities;
  return j;
}

std::string serialize_predictions(std::span<const PredictionRecord> preds) {
  std::string out;
  for (const auto& p : preds) {
    out += to_json(p).dump();
    out.push_back('\n');
  }
  return out;
}

void write_predictions(std::span<const PredictionRecord> preds, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_predictions(preds));
}

std::vector<PredictionRecord> parse_predictions(std::string_view contents) {
  std::vector<PredictionRecord> out;
  std::vector<std::string> errors;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto nl = contents.find('\n', pos);
    auto line = contents.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? contents.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    json raw = json::parse(line, nullptr, false);
    if (!raw.is_object()) {
      errors.push_back(where + "malformed JSON");
      continue;
    }
    PredictionRecord p;
    auto ps = raw.find("predicted_skills");
    auto pr = raw.find("probabilities");
    if (ps == raw.end() || !ps->is_object()) {
      errors.push_back(where + "missing object 'predicted_skills'");
      continue;
    }
    bool ok = true;
    for (Skill s : kAllSkills) {
      auto it = ps->find(std::string(skill_key(s)));
      if (it == ps->end() || !it->is_boolean()) {
        errors.push_back(where + "predicted_skills." + std::string(skill_key(s)) + " must be a boolean");
        ok = false;
        break;
      }
      p.predicted.set(s, it->get<bool>());
    }
    if (pr == raw.end() || !pr->is_array() || pr->size() != kNumSkills) {
      errors.push_back(where + "'probabilities' must be an array of 6 numbers");
      ok = false;
    } else {
      for (std::size_t i = 0; i < kNumSkills && ok; ++i) {
        if (!(*pr)[i].is_number()) {
          errors.push_back(where + "'probabilities' must be numeric");
          ok = false;
        } else {
          p.probabilities[i] = (*pr)[i].get<double>();
        }
      }
    }
    if (!ok) continue;
    raw.erase("predicted_skills");
    raw.erase("probabilities");
    auto v = validate_task_record(raw);
    if (!v.ok()) {
      for (const auto& e : v.violations) errors.push_back(where + e);
      continue;
    }
    p.record = std::move(*v.record);
    out.push_back(std::move(p));
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

MetricsReport evaluate_predictions(std::span<const TaskRecord> dataset, std::span<const PredictionRecord> preds) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : preds) by_id.emplace(p.record.id, &p);
  std::vector<SkillVector> truths;
  std::vector<SkillVector> predicted;
  std::vector<std::string> missing;
  for (const auto& r : dataset) {
    auto it = by_id.find(r.id);
    if (it == by_id.end()) {
      missing.push_back("no prediction for id '" + r.id + "'");
      continue;
    }
    truths.push_back(r.skills);
    predicted.push_back(it->second->predicted);
  }
  if (!missing.empty()) throw ValidationError(std::move(missing));
  return evaluate(truths, predicted);
}

}  // namespace skillroute
