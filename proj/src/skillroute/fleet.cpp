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

#include "skillroute/fleet.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>

#include "skillroute/dataset.hpp"
#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"

namespace skillroute {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool valid_robot_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
  });
}

std::optional<AssignmentState> parse_state(std::string_view s) {
  if (s == "proposed") return AssignmentState::kProposed;
  if (s == "confirmed") return AssignmentState::kConfirmed;
  if (s == "released") return AssignmentState::kReleased;
  return std::nullopt;
}

std::string assignment_id(std::size_t seq) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "a-%06zu", seq);
  return buf;
}

ordered_json optional_string(const std::optional<std::string>& s) {
  return s ? ordered_json(*s) : ordered_json(nullptr);
}

}  // namespace

ordered_json to_json(const RobotSpec& r) {
  ordered_json j;
  j["id"] = r.id;
  j["type"] = r.type;
  j["skills"] = r.skills.keys();
  j["available"] = r.available;
  return j;
}

RobotSpec robot_from_json(const json& j) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw ValidationError({"robot must be an object"});
  for (const auto& [k, v] : j.items()) {
    if (k != "id" && k != "type" && k != "skills" && k != "available") errors.push_back("unexpected key '" + k + "'");
  }
  RobotSpec r;
  if (!j.contains("id") || !j["id"].is_string()) {
    errors.push_back("id must be a string");
  } else {
    r.id = j["id"].get<std::string>();
    if (!valid_robot_id(r.id)) errors.push_back("id must be 1-64 characters of [A-Za-z0-9._-]");
  }
  if (j.contains("type")) {
    if (j["type"].is_string()) {
      r.type = j["type"].get<std::string>();
    } else {
      errors.push_back("type must be a string");
    }
  }
  if (!j.contains("skills") || !j["skills"].is_array()) {
    errors.push_back("skills must be an array of skill names");
  } else {
    for (const auto& s : j["skills"]) {
      const auto parsed = s.is_string() ? parse_skill(s.get<std::string>()) : std::nullopt;
      if (!parsed) {
        errors.push_back("unknown skill " + s.dump());
        continue;
      }
      r.skills.set(*parsed);
    }
  }
  if (j.contains("available")) {
    if (j["available"].is_boolean()) {
      r.available = j["available"].get<bool>();
    } else {
      errors.push_back("available must be a boolean");
    }
  }
  if (!errors.empty()) throw ValidationError(std::move(errors));
  return r;
}

std::string_view to_string(AssignmentState s) {
  switch (s) {
    case AssignmentState::kProposed: return "proposed";
    case AssignmentState::kConfirmed: return "confirmed";
    case AssignmentState::kReleased: return "released";
  }
  return "unknown";
}

ordered_json to_json(const Assignment& a) {
  ordered_json j;
  j["id"] = a.id;
  j["robot_id"] = a.robot_id;
  j["task_text"] = a.task_text;
  j["state"] = to_string(a.state);
  j["proposed_at"] = a.proposed_at;
  j["confirmed_at"] = a.confirmed_at.empty() ? ordered_json(nullptr) : ordered_json(a.confirmed_at);
  j["released_at"] = a.released_at.empty() ? ordered_json(nullptr) : ordered_json(a.released_at);
  return j;
}

ordered_json to_json(const FleetState& s) {
  ordered_json robots = ordered_json::array();
  for (const auto& r : s.robots) robots.push_back(to_json(r));
  return {{"robots", robots}};
}

FleetState fleet_state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("robots") || !j["robots"].is_array()) {
    throw ValidationError({"fleet document must be {\"robots\": [...]}"});
  }
  FleetState s;
  for (std::size_t i = 0; i < j["robots"].size(); ++i) {
    try {
      s.robots.push_back(robot_from_json(j["robots"][i]));
    } catch (const ValidationError& e) {
      std::vector<std::string> v;
      for (const auto& m : e.violations()) v.push_back("robots[" + std::to_string(i) + "]: " + m);
      throw ValidationError(std::move(v));
    }
  }
  std::sort(s.robots.begin(), s.robots.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < s.robots.size(); ++i) {
    if (s.robots[i].id == s.robots[i - 1].id) throw ValidationError({"duplicate robot id '" + s.robots[i].id + "'"});
  }
  return s;
}

std::vector<std::string> eligible_robots(SkillVector required, const FleetState& fleet) {
  std::vector<std::string> out;
  for (const auto& r : fleet.robots) {
    if (r.available && required.subset_of(r.skills)) out.push_back(r.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string least_capable_sufficient(std::span<const RobotSpec> eligible) {
  if (eligible.empty()) throw ArgumentError("no eligible robot to choose from");
  const auto it = std::min_element(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
    if (a.skills.count() != b.skills.count()) return a.skills.count() < b.skills.count();
    return a.id < b.id;
  });
  return it->id;
}

std::string_view to_string(RouteStatus s) {
  switch (s) {
    case RouteStatus::kRouted: return "routed";
    case RouteStatus::kNeedsReview: return "needs_review";
    case RouteStatus::kNoRobot: return "no_robot";
  }
  return "unknown";
}

ordered_json to_json(const RoutingDecision& d) {
  ordered_json j;
  j["text"] = d.text;
  j["required"] = skills_to_json(d.required);
  j["probabilities"] = d.probabilities;
  j["eligible"] = d.eligible;
  j["status"] = to_string(d.status);
  j["robot_id"] = optional_string(d.robot_id);
  j["assignment_id"] = optional_string(d.assignment_id);
  j["review_threshold"] = d.review_threshold;
  j["override"] = d.override_skills;
  j["reason"] = d.reason;
  j["timestamp"] = d.timestamp;
  return j;
}

bool needs_review(SkillVector required, const Probabilities& probabilities, double threshold) {
  if (required.none()) return true;
  for (std::size_t i = 0; i < kNumSkills; ++i) {
    if (required.test(i) && probabilities[i] < threshold) return true;
  }
  return false;
}

Fleet::Fleet(std::filesystem::path fleet_file, std::filesystem::path journal, Clock clock)
    : fleet_file_(std::move(fleet_file)), journal_file_(std::move(journal)), clock_(std::move(clock)) {
  if (!clock_) clock_ = utc_timestamp;
}

Fleet::Fleet(Fleet&& other) noexcept
    : fleet_file_(std::move(other.fleet_file_)),
      journal_file_(std::move(other.journal_file_)),
      clock_(std::move(other.clock_)),
      robots_(std::move(other.robots_)),
      assignments_(std::move(other.assignments_)),
      next_assignment_(other.next_assignment_) {}

Fleet Fleet::open(const std::filesystem::path& fleet_file, std::optional<std::filesystem::path> journal,
                  Clock clock) {
  auto j = journal.value_or(std::filesystem::path(fleet_file.string() + ".journal"));
  Fleet f(fleet_file, std::move(j), std::move(clock));
  f.load();
  return f;
}

void Fleet::load() {
  if (std::filesystem::exists(fleet_file_)) {
    const json doc = json::parse(read_file(fleet_file_), nullptr, false);
    if (doc.is_discarded()) throw ValidationError({"fleet file " + fleet_file_.string() + " is not valid JSON"});
    robots_ = fleet_state_from_json(doc).robots;
  } else {
    save_registry();
  }
  if (!std::filesystem::exists(journal_file_)) return;

  const auto text = read_file(journal_file_);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const auto line = std::string_view(text).substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = journal_file_.string() + " line " + std::to_string(line_no);
    const json e = json::parse(line, nullptr, false);
    if (e.is_discarded() || !e.is_object()) throw IntegrityError(where + ": not valid JSON");
    try {
      const auto id = e.at("assignment").get<std::string>();
      const auto state = parse_state(e.at("state").get<std::string>());
      const auto at = e.at("at").get<std::string>();
      if (!state) throw IntegrityError(where + ": unknown state");
      if (*state == AssignmentState::kProposed) {
        Assignment a{id, e.at("robot").get<std::string>(), e.at("text").get<std::string>(),
                     AssignmentState::kProposed, at, "", ""};
        assignments_[id] = a;
        next_assignment_ = std::max(next_assignment_, e.at("seq").get<std::size_t>() + 1);
        continue;
      }
      const auto it = assignments_.find(id);
      if (it == assignments_.end()) throw IntegrityError(where + ": transition for unknown assignment " + id);
      it->second.state = *state;
      (*state == AssignmentState::kConfirmed ? it->second.confirmed_at : it->second.released_at) = at;
    } catch (const json::exception& ex) {
      throw IntegrityError(where + ": " + ex.what());
    }
  }
}

void Fleet::save_registry() const {
  write_file_atomic(fleet_file_, to_json(FleetState{robots_}).dump(2) + "\n");
}

void Fleet::append_journal(const Assignment& a, AssignmentState state, const std::string& at) {
  ordered_json e;
  e["assignment"] = a.id;
  e["state"] = to_string(state);
  e["at"] = at;
  if (state == AssignmentState::kProposed) {
    e["seq"] = next_assignment_ - 1;
    e["robot"] = a.robot_id;
    e["text"] = a.task_text;
  }
  std::ofstream out(journal_file_, std::ios::app | std::ios::binary);
  if (!out) throw IoError("cannot open journal " + journal_file_.string());
  out << e.dump() << '\n';
  out.flush();
  if (!out) throw IoError("cannot append to journal " + journal_file_.string());
}

bool Fleet::busy_locked(const std::string& robot_id) const {
  return std::any_of(assignments_.begin(), assignments_.end(), [&](const auto& kv) {
    return kv.second.robot_id == robot_id && kv.second.state == AssignmentState::kConfirmed;
  });
}

FleetState Fleet::snapshot_locked() const {
  FleetState s{robots_};
  for (auto& r : s.robots) r.available = r.available && !busy_locked(r.id);
  return s;
}

FleetState Fleet::snapshot() const {
  std::shared_lock lock(mutex_);
  return snapshot_locked();
}

std::vector<Assignment> Fleet::assignments() const {
  std::shared_lock lock(mutex_);
  std::vector<Assignment> out;
  for (const auto& [id, a] : assignments_) out.push_back(a);
  return out;
}

std::optional<Assignment> Fleet::assignment(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = assignments_.find(id);
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

RobotSpec Fleet::add_robot(const RobotSpec& robot) {
  if (!valid_robot_id(robot.id)) throw ValidationError({"id must be 1-64 characters of [A-Za-z0-9._-]"});
  std::unique_lock lock(mutex_);
  const auto it = std::lower_bound(robots_.begin(), robots_.end(), robot.id,
                                   [](const RobotSpec& r, const std::string& id) { return r.id < id; });
  if (it != robots_.end() && it->id == robot.id) throw ConflictError("robot '" + robot.id + "' already exists");
  robots_.insert(it, robot);
  try {
    save_registry();
  } catch (...) {
    robots_.erase(std::find(robots_.begin(), robots_.end(), robot));
    throw;
  }
  return robot;
}

void Fleet::remove_robot(const std::string& id) {
  std::unique_lock lock(mutex_);
  const auto it = std::find_if(robots_.begin(), robots_.end(), [&](const auto& r) { return r.id == id; });
  if (it == robots_.end()) throw NotFoundError("robot '" + id + "' not found");
  if (busy_locked(id)) throw ConflictError("robot '" + id + "' holds a confirmed assignment");
  const RobotSpec removed = *it;
  robots_.erase(it);
  try {
    save_registry();
  } catch (...) {
    robots_.insert(std::lower_bound(robots_.begin(), robots_.end(), removed,
                                    [](const auto& a, const auto& b) { return a.id < b.id; }),
                   removed);
    throw;
  }
}

RoutingDecision Fleet::route(std::string_view text, const EnsembleModel& model, const RoutingPolicy& policy) {
  if (model.members().empty()) throw ConfigError("routing needs a loaded model");
  const auto prediction = predict_ensemble(model, text);
  return route_required(text, prediction.skills, prediction.probabilities, policy, false);
}

RoutingDecision Fleet::route_required(std::string_view text, SkillVector required, const Probabilities& probabilities,
                                      const RoutingPolicy& policy, bool human_override) {
  if (!(policy.review_threshold >= 0.0 && policy.review_threshold <= 1.0)) {
    throw ArgumentError("review threshold must lie in [0, 1]");
  }
  RoutingDecision d;
  d.text = std::string(text);
  d.required = required;
  d.probabilities = probabilities;
  d.review_threshold = policy.review_threshold;
  d.override_skills = human_override;

  std::unique_lock lock(mutex_);
  d.timestamp = clock_();
  const auto state = snapshot_locked();
  if (!required.none()) d.eligible = eligible_robots(required, state);

  if (required.none()) {
    d.status = RouteStatus::kNeedsReview;
    d.reason = "no skill predicted";
    return d;
  }
  if (!human_override && needs_review(required, probabilities, policy.review_threshold)) {
    d.status = RouteStatus::kNeedsReview;
    d.reason = "a required skill is below the review threshold";
    return d;
  }
  if (d.eligible.empty()) {
    d.status = RouteStatus::kNoRobot;
    d.reason = "no available robot has every required skill";
    return d;
  }

  std::vector<RobotSpec> candidates;
  for (const auto& r : state.robots) {
    if (std::binary_search(d.eligible.begin(), d.eligible.end(), r.id)) candidates.push_back(r);
  }
  const auto chosen = (policy.select ? policy.select : least_capable_sufficient)(candidates);
  if (!std::binary_search(d.eligible.begin(), d.eligible.end(), chosen)) {
    throw ConfigError("selection policy chose ineligible robot '" + chosen + "'");
  }

  Assignment a{assignment_id(next_assignment_), chosen, d.text, AssignmentState::kProposed, d.timestamp, "", ""};
  ++next_assignment_;
  try {
    append_journal(a, AssignmentState::kProposed, a.proposed_at);
  } catch (...) {
    --next_assignment_;
    throw;
  }
  assignments_[a.id] = a;
  d.status = RouteStatus::kRouted;
  d.robot_id = chosen;
  d.assignment_id = a.id;
  d.reason = "least-capable sufficient robot";
  return d;
}

TransitionResult Fleet::confirm(const std::string& id) {
  std::unique_lock lock(mutex_);
  const auto it = assignments_.find(id);
  if (it == assignments_.end()) throw NotFoundError("assignment '" + id + "' not found");
  auto& a = it->second;
  switch (a.state) {
    case AssignmentState::kConfirmed:
      return {a, "assignment '" + id + "' is already confirmed"};
    case AssignmentState::kReleased:
      throw StateError("assignment '" + id + "' was released and cannot be confirmed");
    case AssignmentState::kProposed:
      break;
  }
  const auto robot = std::find_if(robots_.begin(), robots_.end(), [&](const auto& r) { return r.id == a.robot_id; });
  if (robot == robots_.end()) throw ConflictError("robot '" + a.robot_id + "' is no longer in the fleet");
  if (busy_locked(a.robot_id)) throw ConflictError("robot '" + a.robot_id + "' is busy with another assignment");
  if (!robot->available) throw ConflictError("robot '" + a.robot_id + "' is marked unavailable");
  const auto at = clock_();
  append_journal(a, AssignmentState::kConfirmed, at);
  a.state = AssignmentState::kConfirmed;
  a.confirmed_at = at;
  return {a, std::nullopt};
}

TransitionResult Fleet::release(const std::string& id) {
  std::unique_lock lock(mutex_);
  const auto it = assignments_.find(id);
  if (it == assignments_.end()) throw NotFoundError("assignment '" + id + "' not found");
  auto& a = it->second;
  if (a.state == AssignmentState::kReleased) return {a, "assignment '" + id + "' is already released"};
  const auto at = clock_();
  append_journal(a, AssignmentState::kReleased, at);
  a.state = AssignmentState::kReleased;
  a.released_at = at;
  return {a, std::nullopt};
}

}  // namespace skillroute
