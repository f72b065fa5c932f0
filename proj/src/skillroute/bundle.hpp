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

// Model bundle: a directory holding manifest.json plus one weight blob per
// member. Blobs are float64 little-endian, each tensor in column-major order,
// tensors concatenated in manifest order. The manifest carries a sha256 per
// blob and a sha256 over its own canonical form.

#include <filesystem>
#include <span>
#include <variant>

#include "skillroute/model.hpp"

namespace skillroute {

inline constexpr int kBundleFormatVersion = 1;

struct ModelBundle {
  std::variant<MemberModel, EnsembleModel> model;

  bool is_member() const { return std::holds_alternative<MemberModel>(model); }
  /// A member becomes a one-member ensemble that keeps the member's thresholds.
  EnsembleModel as_ensemble() const;
};

void save_bundle(const MemberModel& model, const std::filesystem::path& dir);
void save_bundle(const EnsembleModel& model, const std::filesystem::path& dir);

/// Throws IntegrityError for a missing, truncated or tampered file and
/// ConfigError when the manifest names an unregistered backend.
ModelBundle load_bundle(const std::filesystem::path& dir);

/// Loads every bundle and pools all their members into one ensemble. With a
/// single bundle its thresholds are kept; otherwise they reset to 0.5.
EnsembleModel load_ensemble(std::span<const std::filesystem::path> dirs);

}  // namespace skillroute
