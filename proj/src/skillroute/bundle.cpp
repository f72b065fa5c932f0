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

#include "skillroute/bundle.hpp"

#include <bit>
#include <cstring>

#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"

namespace skillroute {

using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kLayout =
    "float64 little-endian; each tensor column-major; tensors concatenated in manifest order";

std::vector<TensorRef> member_state(MemberModel& m) {
  auto out = m.head().state();
  auto blocks = m.backend().block_tensors();
  out.insert(out.end(), blocks.begin(), blocks.end());
  return out;
}

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return __builtin_bswap64(v);
}

std::string pack(const std::vector<TensorRef>& tensors) {
  std::string blob;
  for (const auto& t : tensors) {
    for (std::size_t i = 0; i < t.size; ++i) {
      const auto bits = to_le(std::bit_cast<std::uint64_t>(t.data[i]));
      blob.append(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
  return blob;
}

json thresholds_json(const Thresholds& t) { return json(std::vector<double>(t.begin(), t.end())); }

Thresholds thresholds_from(const json& j) {
  auto v = j.get<std::vector<double>>();
  validate_thresholds(v);
  Thresholds t{};
  std::copy(v.begin(), v.end(), t.begin());
  return t;
}

std::string manifest_digest(json manifest) {
  manifest.erase("manifest_sha256");
  return sha256_hex(manifest.dump());
}

void write_bundle(std::vector<MemberModel> members, const Thresholds& thresholds, bool is_member,
                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create bundle directory " + dir.string() + ": " + ec.message());

  json manifest;
  manifest["format_version"] = kBundleFormatVersion;
  manifest["kind"] = is_member ? "member" : "ensemble";
  manifest["layout"] = kLayout;
  manifest["thresholds"] = thresholds_json(thresholds);
  json jm = json::array();
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto& m = members[i];
    auto tensors = member_state(m);
    const auto blob = pack(tensors);
    const auto file = "member" + std::to_string(i) + ".bin";
    write_file_atomic(dir / file, blob);

    json jt = json::array();
    std::size_t offset = 0;
    for (const auto& t : tensors) {
      jt.push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
      offset += t.size * sizeof(double);
    }
    jm.push_back({
        {"name", m.name()},
        {"backend", m.backend().name()},
        {"dim", m.backend().dim()},
        {"max_tokens", m.backend().max_tokens()},
        {"trainable_blocks", m.backend().trainable_blocks()},
        {"head", to_json(m.head().config())},
        {"thresholds", thresholds_json(m.thresholds())},
        {"config_hash", m.metadata().config_hash},
        {"seed", m.metadata().seed},
        {"weights", {{"file", file}, {"bytes", blob.size()}, {"sha256", sha256_hex(blob)}, {"tensors", jt}}},
    });
  }
  manifest["members"] = jm;
  manifest["config_hash"] = members.size() == 1 ? members[0].metadata().config_hash : "";
  manifest["manifest_sha256"] = manifest_digest(manifest);
  write_file_atomic(dir / kManifest, manifest.dump(2) + "\n");
}

MemberModel load_member(const json& jm, const std::filesystem::path& dir) {
  const auto backend_name = jm.at("backend").get<std::string>();
  auto backend = make_backend(backend_name);
  if (backend->dim() != jm.at("dim").get<std::size_t>()) {
    throw IntegrityError("backend '" + backend_name + "' dimension does not match the bundle");
  }
  backend->set_max_tokens(jm.at("max_tokens").get<std::size_t>());
  backend->set_trainable_blocks(jm.at("trainable_blocks").get<std::size_t>());
  ClassifierHead head(backend->dim(), head_config_from_json(jm.at("head")), 0);
  MemberModel m(jm.at("name").get<std::string>(), std::move(backend), std::move(head),
                thresholds_from(jm.at("thresholds")),
                ModelMetadata{jm.at("config_hash").get<std::string>(), jm.at("seed").get<std::uint64_t>()});

  const auto& w = jm.at("weights");
  const auto file = dir / w.at("file").get<std::string>();
  std::string blob;
  try {
    blob = read_file(file);
  } catch (const IoError&) {
    throw IntegrityError("missing weight blob " + file.string());
  }
  if (blob.size() != w.at("bytes").get<std::size_t>() || sha256_hex(blob) != w.at("sha256").get<std::string>()) {
    throw IntegrityError("checksum mismatch for " + file.string());
  }

  auto tensors = member_state(m);
  const auto& jt = w.at("tensors");
  if (jt.size() != tensors.size()) throw IntegrityError("tensor count mismatch in " + file.string());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& t = tensors[i];
    if (jt[i].at("name").get<std::string>() != t.name ||
        jt[i].at("shape").get<std::vector<std::size_t>>() != t.shape) {
      throw IntegrityError("tensor '" + t.name + "' does not match the manifest");
    }
    const auto offset = jt[i].at("offset").get<std::size_t>();
    if (offset + t.size * sizeof(double) > blob.size()) throw IntegrityError("tensor '" + t.name + "' out of range");
    for (std::size_t k = 0; k < t.size; ++k) {
      std::uint64_t bits;
      std::memcpy(&bits, blob.data() + offset + k * sizeof bits, sizeof bits);
      t.data[k] = std::bit_cast<double>(to_le(bits));
    }
  }
  return m;
}

}  // namespace

EnsembleModel ModelBundle::as_ensemble() const {
  if (const auto* m = std::get_if<MemberModel>(&model)) return EnsembleModel({*m}, m->thresholds());
  return std::get<EnsembleModel>(model);
}

void save_bundle(const MemberModel& model, const std::filesystem::path& dir) {
  write_bundle({model}, model.thresholds(), true, dir);
}

void save_bundle(const EnsembleModel& model, const std::filesystem::path& dir) {
  if (model.members().empty()) throw ConfigError("cannot save an ensemble without members");
  write_bundle(model.members(), model.thresholds(), false, dir);
}

ModelBundle load_bundle(const std::filesystem::path& dir) {
  std::string text;
  try {
    text = read_file(dir / kManifest);
  } catch (const IoError&) {
    throw IoError("no bundle manifest at " + (dir / kManifest).string());
  }
  json manifest = json::parse(text, nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    throw IntegrityError("bundle manifest is not valid JSON: " + (dir / kManifest).string());
  }
  try {
    if (manifest.value("manifest_sha256", std::string()) != manifest_digest(manifest)) {
      throw IntegrityError("bundle manifest checksum mismatch");
    }
    if (manifest.at("format_version").get<int>() != kBundleFormatVersion) {
      throw IntegrityError("unsupported bundle format version");
    }
    std::vector<MemberModel> members;
    for (const auto& jm : manifest.at("members")) members.push_back(load_member(jm, dir));
    if (members.empty()) throw IntegrityError("bundle has no members");
    const auto thresholds = thresholds_from(manifest.at("thresholds"));
    if (manifest.at("kind").get<std::string>() == "member") {
      if (members.size() != 1) throw IntegrityError("member bundle must hold exactly one member");
      return ModelBundle{std::move(members.front())};
    }
    return ModelBundle{EnsembleModel(std::move(members), thresholds)};
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed bundle manifest: ") + e.what());
  }
}

EnsembleModel load_ensemble(std::span<const std::filesystem::path> dirs) {
  if (dirs.empty()) throw ConfigError("no model bundles given");
  if (dirs.size() == 1) return load_bundle(dirs.front()).as_ensemble();
  std::vector<MemberModel> members;
  for (const auto& d : dirs) {
    auto e = load_bundle(d).as_ensemble();
    for (auto& m : e.members()) members.push_back(std::move(m));
  }
  return EnsembleModel(std::move(members));
}

}  // namespace skillroute
