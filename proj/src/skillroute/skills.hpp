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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skillroute {

// Differentiating physical capabilities. The enumerator order is the canonical
// order used by every vector, report and wire format.
enum class Skill : std::uint8_t {
  kFly = 0,
  kLegs,
  kWheels,
  kHands,
  kUnderWater,
  kSurfaceWater,
};

inline constexpr std::size_t kNumSkills = 6;

inline constexpr std::array<Skill, kNumSkills> kAllSkills = {
    Skill::kFly,   Skill::kLegs,       Skill::kWheels,
    Skill::kHands, Skill::kUnderWater, Skill::kSurfaceWater};

/// snake_case key, e.g. "under_water".
std::string_view skill_key(Skill s);
/// Human-readable label, e.g. "Under Water".
std::string_view skill_label(Skill s);

/// Case-insensitive; spaces and hyphens are treated as underscores.
std::optional<Skill> parse_skill(std::string_view name);

constexpr std::size_t index_of(Skill s) { return static_cast<std::size_t>(s); }

class SkillVector {
 public:
  constexpr SkillVector() = default;

  static constexpr SkillVector from_mask(std::uint8_t mask) {
    SkillVector v;
    v.mask_ = mask & 0x3f;
    return v;
  }
  static SkillVector from_bits(std::span<const bool> bits);
  static SkillVector from_bits(std::span<const int> bits);

  constexpr std::uint8_t mask() const { return mask_; }

  constexpr bool test(Skill s) const { return (mask_ >> index_of(s)) & 1u; }
  constexpr bool test(std::size_t i) const { return (mask_ >> i) & 1u; }
  constexpr SkillVector& set(Skill s, bool on = true) { return set(index_of(s), on); }
  constexpr SkillVector& set(std::size_t i, bool on = true) {
    if (on) {
      mask_ |= static_cast<std::uint8_t>(1u << i);
    } else {
      mask_ &= static_cast<std::uint8_t>(~(1u << i));
    }
    return *this;
  }

  constexpr int count() const { return __builtin_popcount(mask_); }
  constexpr bool none() const { return mask_ == 0; }

  /// True when every bit of *this is also set in `other`.
  constexpr bool subset_of(SkillVector other) const { return (mask_ & other.mask_) == mask_; }

  std::array<bool, kNumSkills> bits() const;
  std::vector<Skill> skills() const;
  std::vector<std::string> keys() const;

  /// "fly+hands" style, "none" for the empty vector.
  std::string combination_name() const;

  friend constexpr bool operator==(SkillVector a, SkillVector b) { return a.mask_ == b.mask_; }
  friend constexpr auto operator<=>(SkillVector a, SkillVector b) { return a.mask_ <=> b.mask_; }

 private:
  std::uint8_t mask_ = 0;
};

/// Every name must be a canonical skill name; throws ValidationError naming
/// each offending string.
SkillVector skill_vector_from_names(std::span<const std::string> names);
SkillVector skill_vector_from_names(std::initializer_list<std::string_view> names);

/// The 15 unordered pairs in canonical order: (fly,legs), (fly,wheels), ...
const std::array<std::pair<Skill, Skill>, 15>& skill_pairs();
std::size_t pair_index(Skill a, Skill b);

}  // namespace skillroute
