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

#include "skillroute/skills.hpp"

#include <algorithm>
#include <cctype>

#include "skillroute/error.hpp"

namespace skillroute {
namespace {

constexpr std::array<std::string_view, kNumSkills> kKeys = {
    "fly", "legs", "wheels", "hands", "under_water", "surface_water"};
constexpr std::array<std::string_view, kNumSkills> kLabels = {
    "Fly", "Legs", "Wheels", "Hands", "Under Water", "Surface Water"};

std::string normalize(std::string_view name) {
  auto b = name.find_first_not_of(" \t\r\n");
  auto e = name.find_last_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  name = name.substr(b, e - b + 1);
  std::string out;
  out.reserve(name.size());
  bool pending_sep = false;
  for (char c : name) {
    if (c == ' ' || c == '_' || c == '-' || c == '\t') {
      pending_sep = true;
      continue;
    }
    if (pending_sep && !out.empty()) out.push_back('_');
    pending_sep = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view skill_key(Skill s) { return kKeys[index_of(s)]; }
std::string_view skill_label(Skill s) { return kLabels[index_of(s)]; }

std::optional<Skill> parse_skill(std::string_view name) {
  const auto n = normalize(name);
  for (std::size_t i = 0; i < kNumSkills; ++i) {
    if (n == kKeys[i]) return static_cast<Skill>(i);
  }
  return std::nullopt;
}

SkillVector SkillVector::from_bits(std::span<const bool> bits) {
  if (bits.size() != kNumSkills) {
    throw ArgumentError("skill vector needs exactly 6 bits, got " + std::to_string(bits.size()));
  }
  SkillVector v;
  for (std::size_t i = 0; i < kNumSkills; ++i) v.set(i, bits[i]);
  return v;
}

SkillVector SkillVector::from_bits(std::span<const int> bits) {
  if (bits.size() != kNumSkills) {
    throw ArgumentError("skill vector needs exactly 6 bits, got " + std::to_string(bits.size()));
  }
  SkillVector v;
  for (std::size_t i = 0; i < kNumSkills; ++i) {
    if (bits[i] != 0 && bits[i] != 1) throw ArgumentError("skill bits must be 0 or 1");
    v.set(i, bits[i] == 1);
  }
  return v;
}

std::array<bool, kNumSkills> SkillVector::bits() const {
  std::array<bool, kNumSkills> out{};
  for (std::size_t i = 0; i < kNumSkills; ++i) out[i] = test(i);
  return out;
}

std::vector<Skill> SkillVector::skills() const {
  std::vector<Skill> out;
  for (Skill s : kAllSkills) {
    if (test(s)) out.push_back(s);
  }
  return out;
}

std::vector<std::string> SkillVector::keys() const {
  std::vector<std::string> out;
  for (Skill s : kAllSkills) {
    if (test(s)) out.emplace_back(skill_key(s));
  }
  return out;
}

std::string SkillVector::combination_name() const {
  if (none()) return "none";
  std::string out;
  for (Skill s : kAllSkills) {
    if (!test(s)) continue;
    if (!out.empty()) out.push_back('+');
    out += skill_key(s);
  }
  return out;
}

SkillVector skill_vector_from_names(std::span<const std::string> names) {
  SkillVector v;
  std::vector<std::string> bad;
  for (const auto& n : names) {
    if (auto s = parse_skill(n)) {
      v.set(*s);
    } else {
      bad.push_back("unknown skill name '" + n + "'");
    }
  }
  if (!bad.empty()) throw ValidationError(std::move(bad));
  return v;
}

SkillVector skill_vector_from_names(std::initializer_list<std::string_view> names) {
  std::vector<std::string> v(names.begin(), names.end());
  return skill_vector_from_names(std::span<const std::string>(v));
}

const std::array<std::pair<Skill, Skill>, 15>& skill_pairs() {
  static const auto pairs = [] {
    std::array<std::pair<Skill, Skill>, 15> out{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < kNumSkills; ++i) {
      for (std::size_t j = i + 1; j < kNumSkills; ++j) {
        out[k++] = {static_cast<Skill>(i), static_cast<Skill>(j)};
      }
    }
    return out;
  }();
  return pairs;
}

std::size_t pair_index(Skill a, Skill b) {
  auto i = index_of(a);
  auto j = index_of(b);
  if (i == j) throw ArgumentError("a skill pair needs two distinct skills");
  if (i > j) std::swap(i, j);
  // Row-major position in the strict upper triangle.
  return i * kNumSkills - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace skillroute
