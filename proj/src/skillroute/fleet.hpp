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

// Robot registry, skill-superset matching, routing with a review path, and
// the assignment lifecycle. The fleet file holds the registry; assignment
// transitions go to an append-only journal that is replayed on open.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillroute/model.hpp"
#include "skillroute/skills.hpp"

namespace skillroute {

inline constexpr double kDefaultReviewThreshold = 0.65;

struct RobotSpec {
  std::string id;
  std::string type;
  SkillVector skills;  // what the robot has; all-zero is allowed
  bool available = true;

  friend bool operator==(const RobotSpec&, const RobotSpec&) = default;
};

nlohmann::ordered_json to_json(const RobotSpec& r);
RobotSpec robot_from_json(const nlohmann::json& j);

enum class AssignmentState { kProposed, kConfirmed, kReleased };
std::string_view to_string(AssignmentState s);

struct Assignment {
  std::string id;
  std::string robot_id;
  std::string task_text;
  AssignmentState state = AssignmentState::kProposed;
  std::string proposed_at;
  std::string confirmed_at;  // empty until confirmed
  std::string released_at;   // empty until released

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

nlohmann::ordered_json to_json(const Assignment& a);

/// Robots ordered by id. `available` here is the effective value: the
/// registry flag and no confirmed assignment.
struct FleetState {
  std::vector<RobotSpec> robots;

  friend bool operator==(const FleetState&, const FleetState&) = default;
};

nlohmann::ordered_json to_json(const FleetState& s);
FleetState fleet_state_from_json(const nlohmann::json& j);

/// Available robots whose skills are a superset of `required`, by id.
std::vector<std::string> eligible_robots(SkillVector required, const FleetState& fleet);

/// Picks one robot from a non-empty eligible list.
using SelectionPolicy = std::function<std::string(std::span<const RobotSpec> eligible)>;

/// Fewest skill bits wins; ties go to the lowest id.
std::string least_capable_sufficient(std::span<const RobotSpec> eligible);

struct RoutingPolicy {
  double review_threshold = kDefaultReviewThreshold;
  SelectionPolicy select = least_capable_sufficient;
};

enum class RouteStatus { kRouted, kNeedsReview, kNoRobot };
std::string_view to_string(RouteStatus s);

struct RoutingDecision {
  std::string text;
  SkillVector required;
  Probabilities probabilities{};
  std::vector<std::string> eligible;
  RouteStatus status = RouteStatus::kNeedsReview;
  std::optional<std::string> robot_id;
  std::optional<std::string> assignment_id;
  double review_threshold = kDefaultReviewThreshold;
  bool override_skills = false;  // required came from a human edit
  std::string reason;
  std::string timestamp;
};

nlohmann::ordered_json to_json(const RoutingDecision& d);

/// True when the decision must go to a human: nothing required, or some
/// required skill's probability is below the threshold.
bool needs_review(SkillVector required, const Probabilities& probabilities, double threshold);

struct TransitionResult {
  Assignment assignment;
  std::optional<std::string> warning;  // set for idempotent no-ops
};

using Clock = std::function<std::string()>;

/// Persistent fleet. Mutations are serialized; snapshots may be taken
/// concurrently with routing.
class Fleet {
 public:
  /// Loads `fleet_file` (created empty when missing) and replays `journal`,
  /// which defaults to "<fleet_file>.journal".
  static Fleet open(const std::filesystem::path& fleet_file, std::optional<std::filesystem::path> journal = {},
                    Clock clock = {});

  Fleet(Fleet&& other) noexcept;

  FleetState snapshot() const;
  std::vector<Assignment> assignments() const;
  std::optional<Assignment> assignment(const std::string& id) const;

  /// ConflictError for a duplicate id.
  RobotSpec add_robot(const RobotSpec& robot);
  /// NotFoundError for an unknown id, ConflictError while it holds a
  /// confirmed assignment.
  void remove_robot(const std::string& id);

  /// Predicts with `model`, then routes on the prediction.
  RoutingDecision route(std::string_view text, const EnsembleModel& model, const RoutingPolicy& policy = {});
  /// Routes on a given skill vector. With `human_override` the probability
  /// review check is skipped; an empty vector still needs review.
  RoutingDecision route_required(std::string_view text, SkillVector required, const Probabilities& probabilities,
                                 const RoutingPolicy& policy = {}, bool human_override = false);

  TransitionResult confirm(const std::string& assignment_id);
  TransitionResult release(const std::string& assignment_id);

  const std::filesystem::path& fleet_file() const { return fleet_file_; }
  const std::filesystem::path& journal_file() const { return journal_file_; }

 private:
  Fleet(std::filesystem::path fleet_file, std::filesystem::path journal, Clock clock);

  void load();
  void save_registry() const;
  void append_journal(const Assignment& a, AssignmentState state, const std::string& at);
  FleetState snapshot_locked() const;
  bool busy_locked(const std::string& robot_id) const;

  std::filesystem::path fleet_file_;
  std::filesystem::path journal_file_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::vector<RobotSpec> robots_;  // registry flags, sorted by id
  std::map<std::string, Assignment> assignments_;
  std::size_t next_assignment_ = 1;
};

}  // namespace skillroute
