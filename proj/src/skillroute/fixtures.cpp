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

#include "skillroute/fixtures.hpp"

#include <array>
#include <cstdio>

namespace skillroute::fixtures {
namespace {

using Phrases = std::vector<const char*>;

const std::array<Phrases, kNumSkills>& cue_phrases() {
  static const std::array<Phrases, kNumSkills> cues = {{
      {"from the air", "with an aerial flight overhead", "by flying above the canopy",
       "flying over the rooftops", "from high altitude in flight", "with an airborne pass"},
      {"climbing the stairs", "across loose rubble", "stepping over fallen rocks",
       "up the steep rocky slope", "through the uneven boulder field", "scrambling over debris"},
      {"driving fast across the flat floor", "along the smooth paved road",
       "at speed on level concrete", "hauling a heavy payload on the flat lot",
       "rolling quickly down the long corridor", "on the smooth asphalt track"},
      {"grasping and turning the valve", "picking up the small parts", "gripping the tool by hand",
       "opening the latch with a gripper", "manipulating the samples carefully",
       "twisting the handle and placing the cap"},
      {"beneath the water on the seabed", "diving underwater to the hull", "deep under the lake",
       "submerged along the reef", "underwater at the dam intake", "below the waves near the pier"},
      {"floating on the lake surface", "across the river surface", "on the harbor surface waters",
       "skimming the pond surface", "along the canal waterline", "drifting on the reservoir surface"},
  }};
  return cues;
}

const Phrases kVerbs = {"inspect", "monitor", "survey", "check", "document", "patrol", "map", "assess"};
const Phrases kObjects = {"the equipment", "the site",    "the structure",  "the work area",
                          "the storage zone", "the assets", "the perimeter", "the installation"};

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[rng.below(v.size())];
}

}  // namespace

const std::vector<SkillVector>& fixture_combinations() {
  static const std::vector<SkillVector> combos = {
      skill_vector_from_names({"fly"}),
      skill_vector_from_names({"legs"}),
      skill_vector_from_names({"wheels"}),
      skill_vector_from_names({"hands"}),
      skill_vector_from_names({"under_water"}),
      skill_vector_from_names({"surface_water"}),
      skill_vector_from_names({"legs", "wheels"}),
      skill_vector_from_names({"legs", "hands"}),
      skill_vector_from_names({"wheels", "hands"}),
      skill_vector_from_names({"fly", "hands"}),
      skill_vector_from_names({"under_water", "hands"}),
      skill_vector_from_names({"fly", "surface_water"}),
  };
  return combos;
}

std::string task_text(SkillVector skills, Rng& rng) {
  std::string text = pick(kVerbs, rng);
  text += ' ';
  text += pick(kObjects, rng);
  bool first = true;
  for (Skill s : skills.skills()) {
    text += first ? " " : " and ";
    text += pick(cue_phrases()[index_of(s)], rng);
    first = false;
  }
  text[0] = static_cast<char>(text[0] - 'a' + 'A');
  return text;
}

std::string domain_for(SkillVector skills) {
  if (skills.test(Skill::kUnderWater)) return "underwater/marine";
  if (skills.test(Skill::kSurfaceWater)) return "waterway operations";
  if (skills.test(Skill::kFly)) return "aerial operations";
  if (skills.test(Skill::kLegs) && skills.test(Skill::kWheels)) return "emergency/disaster";
  if (skills.test(Skill::kLegs)) return "outdoor/wilderness";
  if (skills.test(Skill::kWheels)) return "warehouse/logistics";
  if (skills.test(Skill::kHands)) return "manufacturing";
  return "other";
}

std::vector<TaskRecord> make_fixture(std::size_t per_combination, std::uint64_t seed,
                                     const std::string& id_prefix) {
  Rng rng(seed);
  std::vector<TaskRecord> out;
  std::size_t n = 0;
  for (std::size_t rep = 0; rep < per_combination; ++rep) {
    for (SkillVector combo : fixture_combinations()) {
      char id[64];
      std::snprintf(id, sizeof id, "%s-%04zu", id_prefix.c_str(), ++n);
      out.push_back(TaskRecord{id, task_text(combo, rng), combo, domain_for(combo), "fixture",
                               Split::kUnassigned});
    }
  }
  return out;
}

}  // namespace skillroute::fixtures
