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

// Deterministic synthetic tasks with strong per-skill lexical cues. Used as
// the offline training fixture and by the canned chat provider.

#include <cstdint>
#include <string>
#include <vector>

#include "skillroute/dataset.hpp"
#include "skillroute/rng.hpp"

namespace skillroute::fixtures {

/// The twelve combinations used by the standard fixture.
const std::vector<SkillVector>& fixture_combinations();

/// A task sentence whose cue phrases imply exactly `skills`.
std::string task_text(SkillVector skills, Rng& rng);

/// A plausible domain tag for the combination.
std::string domain_for(SkillVector skills);

/// `per_combination` records for each fixture combination, source "fixture",
/// ids "<prefix>-0001"...
std::vector<TaskRecord> make_fixture(std::size_t per_combination, std::uint64_t seed,
                                     const std::string& id_prefix = "fx");

}  // namespace skillroute::fixtures
