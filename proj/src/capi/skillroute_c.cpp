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

#include "skillroute/skillroute.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "skillroute/baseline.hpp"
#include "skillroute/bundle.hpp"
#include "skillroute/datagen.hpp"
#include "skillroute/dataset.hpp"
#include "skillroute/error.hpp"
#include "skillroute/fleet.hpp"
#include "skillroute/hashing.hpp"
#include "skillroute/metrics.hpp"
#include "skillroute/model.hpp"
#include "skillroute/service.hpp"
#include "skillroute/training.hpp"

using nlohmann::json;
using nlohmann::ordered_json;
namespace sr = skillroute;
namespace fs = std::filesystem;

struct sr_model {
  sr::EnsembleModel model;
};

struct sr_fleet {
  sr::Fleet fleet;
};

struct sr_service {
  std::unique_ptr<sr::Service> service;
};

namespace {

thread_local std::string g_last_error;

sr_status status_of(sr::ErrorKind kind) {
  switch (kind) {
    case sr::ErrorKind::kArgument: return SR_ERR_ARGUMENT;
    case sr::ErrorKind::kValidation: return SR_ERR_VALIDATION;
    case sr::ErrorKind::kIo: return SR_ERR_IO;
    case sr::ErrorKind::kIntegrity: return SR_ERR_INTEGRITY;
    case sr::ErrorKind::kNotFound: return SR_ERR_NOT_FOUND;
    case sr::ErrorKind::kConflict: return SR_ERR_CONFLICT;
    case sr::ErrorKind::kState: return SR_ERR_STATE;
    case sr::ErrorKind::kTransport: return SR_ERR_TRANSPORT;
    case sr::ErrorKind::kParse: return SR_ERR_PARSE;
    case sr::ErrorKind::kConfig: return SR_ERR_CONFIG;
    case sr::ErrorKind::kTraining: return SR_ERR_TRAINING;
    case sr::ErrorKind::kGenerationFailed: return SR_ERR_GENERATION_FAILED;
  }
  return SR_ERR_INTERNAL;
}

template <typename F>
sr_status guard(F&& body) {
  g_last_error.clear();
  try {
    body();
    return SR_OK;
  } catch (const sr::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_last_error = std::string("malformed options: ") + e.what();
    return SR_ERR_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SR_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const ordered_json& j) {
  if (!out) throw sr::ArgumentError("output pointer is null");
  *out = dup_string(j.dump());
}

void need(const void* p, const char* what) {
  if (!p) throw sr::ArgumentError(std::string(what) + " is null");
}

json parse_options(const char* options) {
  need(options, "options");
  json j = json::parse(options, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw sr::ArgumentError("options must be a JSON object");
  return j;
}

std::string str_opt(const json& o, const char* key) {
  if (!o.contains(key) || !o[key].is_string() || o[key].get<std::string>().empty()) {
    throw sr::ArgumentError(std::string("option '") + key + "' is required");
  }
  return o[key].get<std::string>();
}

std::vector<fs::path> bundle_paths(const json& o) {
  if (!o.contains("bundles")) throw sr::ArgumentError("option 'bundles' is required");
  std::vector<fs::path> out;
  if (o["bundles"].is_string()) {
    out.emplace_back(o["bundles"].get<std::string>());
  } else {
    for (const auto& b : o["bundles"]) out.emplace_back(b.get<std::string>());
  }
  if (out.empty()) throw sr::ArgumentError("option 'bundles' must name at least one bundle");
  return out;
}

// Records of the requested split; "all" keeps everything. With no explicit
// split, test records are used when present, else everything.
std::vector<sr::TaskRecord> select_split(std::vector<sr::TaskRecord> records, const json& o,
                                         const std::string& fallback) {
  const auto which = o.value("split", fallback);
  if (which == "all") return records;
  sr::Split want;
  if (which == "train") {
    want = sr::Split::kTrain;
  } else if (which == "test") {
    want = sr::Split::kTest;
  } else if (which == "auto") {
    const bool has_test = std::any_of(records.begin(), records.end(),
                                      [](const auto& r) { return r.split == sr::Split::kTest; });
    if (!has_test) return records;
    want = sr::Split::kTest;
  } else {
    throw sr::ArgumentError("split must be train, test, all or auto");
  }
  std::vector<sr::TaskRecord> out;
  for (auto& r : records) {
    if (r.split == want) out.push_back(std::move(r));
  }
  if (out.empty()) throw sr::ArgumentError("dataset has no '" + which + "' records");
  return out;
}

std::vector<sr::TaskRecord> training_records(std::vector<sr::TaskRecord> records) {
  std::vector<sr::TaskRecord> out;
  for (auto& r : records) {
    if (r.split != sr::Split::kTest) out.push_back(std::move(r));
  }
  if (out.empty()) throw sr::ArgumentError("dataset has no training records");
  return out;
}

std::vector<sr::PredictionRecord> predict_all(const sr::EnsembleModel& model,
                                              std::span<const sr::TaskRecord> records) {
  std::vector<sr::PredictionRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto p = sr::predict_ensemble(model, r.text);
    out.push_back({r, p.skills, p.probabilities});
  }
  return out;
}

sr::MetricsReport metrics_of(std::span<const sr::PredictionRecord> preds) {
  std::vector<sr::SkillVector> truths, predicted;
  for (const auto& p : preds) {
    truths.push_back(p.record.skills);
    predicted.push_back(p.predicted);
  }
  return sr::evaluate(truths, predicted);
}

sr::BoundaryReport boundary_of(std::span<const sr::PredictionRecord> preds) {
  std::vector<sr::SkillVector> truths, predicted;
  for (const auto& p : preds) {
    truths.push_back(p.record.skills);
    predicted.push_back(p.predicted);
  }
  return sr::mine_boundary_errors(truths, predicted);
}

// A chat provider that answers baseline prompts with the dataset's own labels,
// for offline smoke runs of the harness.
std::unique_ptr<sr::ChatProvider> labels_provider(std::span<const sr::TaskRecord> records) {
  std::map<std::string, sr::SkillVector> by_prompt;
  for (const auto& r : records) by_prompt[sr::build_prompt(r.text)] = r.skills;
  return std::make_unique<sr::CannedProvider>(
      "labels", [m = std::move(by_prompt)](const sr::ChatRequest& req, std::size_t) -> std::string {
        const auto it = m.find(req.user);
        if (it == m.end()) return "I cannot tell.";
        return sr::skills_to_json(it->second).dump();
      });
}

}  // namespace

extern "C" {

const char* sr_version(void) { return "0.3.0"; }

const char* sr_status_name(sr_status status) {
  switch (status) {
    case SR_OK: return "ok";
    case SR_ERR_ARGUMENT: return "argument";
    case SR_ERR_VALIDATION: return "validation";
    case SR_ERR_IO: return "io";
    case SR_ERR_INTEGRITY: return "integrity";
    case SR_ERR_NOT_FOUND: return "not_found";
    case SR_ERR_CONFLICT: return "conflict";
    case SR_ERR_STATE: return "state";
    case SR_ERR_TRANSPORT: return "transport";
    case SR_ERR_PARSE: return "parse";
    case SR_ERR_CONFIG: return "config";
    case SR_ERR_TRAINING: return "training";
    case SR_ERR_GENERATION_FAILED: return "generation_failed";
    case SR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* sr_last_error(void) { return g_last_error.c_str(); }

void sr_string_free(char* s) { std::free(s); }

// ---- models ---------------------------------------------------------------

sr_status sr_model_load(const char* const* bundle_dirs, size_t count, sr_model** out) {
  return guard([&] {
    need(out, "out");
    need(bundle_dirs, "bundle_dirs");
    std::vector<fs::path> dirs;
    for (size_t i = 0; i < count; ++i) {
      need(bundle_dirs[i], "bundle path");
      dirs.emplace_back(bundle_dirs[i]);
    }
    *out = new sr_model{sr::load_ensemble(dirs)};
  });
}

void sr_model_free(sr_model* model) { delete model; }

sr_status sr_model_name(const sr_model* model, char** out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    *out = dup_string(model->model.name());
  });
}

sr_status sr_model_predict(const sr_model* model, const char* text, char** out_json) {
  return guard([&] {
    need(model, "model");
    need(text, "text");
    auto j = sr::to_json(sr::predict_ensemble(model->model, text));
    j["model"] = model->model.name();
    put(out_json, j);
  });
}

// ---- fleet ----------------------------------------------------------------

sr_status sr_fleet_open(const char* fleet_file, const char* journal, sr_fleet** out) {
  return guard([&] {
    need(fleet_file, "fleet_file");
    need(out, "out");
    std::optional<fs::path> j;
    if (journal) j = fs::path(journal);
    *out = new sr_fleet{sr::Fleet::open(fleet_file, j)};
  });
}

void sr_fleet_free(sr_fleet* fleet) { delete fleet; }

sr_status sr_fleet_snapshot(const sr_fleet* fleet, char** out_json) {
  return guard([&] {
    need(fleet, "fleet");
    put(out_json, sr::to_json(fleet->fleet.snapshot()));
  });
}

sr_status sr_fleet_assignments(const sr_fleet* fleet, char** out_json) {
  return guard([&] {
    need(fleet, "fleet");
    ordered_json arr = ordered_json::array();
    for (const auto& a : fleet->fleet.assignments()) arr.push_back(sr::to_json(a));
    put(out_json, ordered_json{{"assignments", arr}});
  });
}

sr_status sr_fleet_add_robot(sr_fleet* fleet, const char* robot_json, char** out_json) {
  return guard([&] {
    need(fleet, "fleet");
    need(robot_json, "robot_json");
    const json j = json::parse(robot_json, nullptr, false);
    if (j.is_discarded()) throw sr::ValidationError({"robot must be a JSON object"});
    put(out_json, sr::to_json(fleet->fleet.add_robot(sr::robot_from_json(j))));
  });
}

sr_status sr_fleet_remove_robot(sr_fleet* fleet, const char* robot_id) {
  return guard([&] {
    need(fleet, "fleet");
    need(robot_id, "robot_id");
    fleet->fleet.remove_robot(robot_id);
  });
}

sr_status sr_fleet_route(sr_fleet* fleet, const sr_model* model, const char* request_json, char** out_json) {
  return guard([&] {
    need(fleet, "fleet");
    if (!model) throw sr::ConfigError("routing needs a loaded model");
    need(request_json, "request_json");
    const json j = json::parse(request_json, nullptr, false);
    if (j.is_discarded()) throw sr::ValidationError({"body must be a JSON object"});
    put(out_json, sr::to_json(sr::route_request(fleet->fleet, model->model, j, sr::kDefaultReviewThreshold)));
  });
}

namespace {

ordered_json transition_json(const sr::TransitionResult& r) {
  ordered_json j;
  j["assignment"] = sr::to_json(r.assignment);
  j["warning"] = r.warning ? ordered_json(*r.warning) : ordered_json(nullptr);
  return j;
}

}  // namespace

sr_status sr_fleet_confirm(sr_fleet* fleet, const char* assignment_id, char** out_json) {
  return guard([&] {
    need(fleet, "fleet");
    need(assignment_id, "assignment_id");
    put(out_json, transition_json(fleet->fleet.confirm(assignment_id)));
  });
}

sr_status sr_fleet_release(sr_fleet* fleet, const char* assignment_id, char** out_json) {
  return guard([&] {
    need(fleet, "fleet");
    need(assignment_id, "assignment_id");
    put(out_json, transition_json(fleet->fleet.release(assignment_id)));
  });
}

// ---- service --------------------------------------------------------------

sr_status sr_service_create(const char* config_file, const char* overrides_json, sr_service** out) {
  return guard([&] {
    need(out, "out");
    std::optional<fs::path> file;
    if (config_file) file = fs::path(config_file);
    auto config = sr::load_service_config(file);
    if (overrides_json) {
      const json patch = json::parse(overrides_json, nullptr, false);
      if (patch.is_discarded() || !patch.is_object()) throw sr::ArgumentError("overrides must be a JSON object");
      json merged = sr::to_json(config);
      merged.merge_patch(patch);
      config = sr::service_config_from_json(merged);
    }
    *out = new sr_service{std::make_unique<sr::Service>(std::move(config))};
  });
}

void sr_service_free(sr_service* service) { delete service; }

sr_status sr_service_start(sr_service* service, int* port) {
  return guard([&] {
    need(service, "service");
    const int p = service->service->start();
    if (port) *port = p;
  });
}

sr_status sr_service_stop(sr_service* service) {
  return guard([&] {
    need(service, "service");
    service->service->stop();
  });
}

sr_status sr_service_run(sr_service* service) {
  return guard([&] {
    need(service, "service");
    service->service->run();
  });
}

// ---- pipeline operations ----------------------------------------------------

sr_status sr_generate(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    json cfg;
    if (o.contains("config") && o["config"].is_object()) {
      cfg = o["config"];
    } else {
      cfg = json::parse(sr::read_file(str_opt(o, "config")), nullptr, false);
      if (cfg.is_discarded()) throw sr::ConfigError("pipeline config is not valid JSON");
    }
    const auto config = sr::pipeline_config_from_json(cfg);
    const auto result = sr::run_generation_pipeline(config);
    const auto output = str_opt(o, "output");
    sr::write_dataset(result.records, output);
    auto summary = sr::to_json(result, config.dedupe_threshold);
    summary["output"] = output;
    if (o.contains("report")) sr::write_file_atomic(str_opt(o, "report"), summary.dump(2) + "\n");
    put(out_json, summary);
  });
}

sr_status sr_boundary(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    sr::BoundarySpec spec;
    const auto a = sr::parse_skill(str_opt(o, "a"));
    const auto b = sr::parse_skill(str_opt(o, "b"));
    if (!a || !b) throw sr::ArgumentError("a and b must be skill names");
    spec.a = *a;
    spec.b = *b;
    spec.a_only = o.value("a_only", std::size_t{0});
    spec.b_only = o.value("b_only", std::size_t{0});
    spec.both = o.value("both", std::size_t{0});
    spec.cue_a = o.value("cue_a", std::string());
    spec.cue_b = o.value("cue_b", std::string());
    spec.cue_both = o.value("cue_both", std::string());
    const auto profile = sr::provider_profile_from_json(o.value("provider", json::object()));
    auto provider = sr::make_provider(profile, o.value("provider_kind", std::string("http")));
    sr::GenerateOptions opts;
    opts.parallelism = o.value("parallelism", opts.parallelism);
    const auto result = sr::generate_boundary_tasks(spec, profile, *provider, opts);
    const auto output = str_opt(o, "output");
    sr::write_dataset(result.records, output);
    auto j = sr::to_json(result.report);
    j["output"] = output;
    put(out_json, j);
  });
}

sr_status sr_audit_sample(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    const auto records = sr::read_dataset(str_opt(o, "dataset"));
    const auto sample =
        sr::sample_for_audit(records, o.value("n", std::size_t{100}), o.value("seed", std::uint64_t{0}));
    const auto output = str_opt(o, "output");
    sr::write_audit_worksheet(sample, output);
    put(out_json, ordered_json{{"sampled", sample.size()}, {"output", output}});
  });
}

sr_status sr_audit_apply(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    const auto records = sr::read_dataset(str_opt(o, "dataset"));
    const auto decisions = sr::read_audit_worksheet(str_opt(o, "worksheet"));
    const auto outcome = sr::apply_audit(records, decisions);
    const auto output = str_opt(o, "output");
    sr::write_dataset(outcome.records, output);
    put(out_json, ordered_json{{"accepted", outcome.summary.accepted},
                               {"rejected", outcome.summary.rejected},
                               {"relabeled", outcome.summary.relabeled},
                               {"undecided", outcome.summary.undecided},
                               {"kept", outcome.records.size()},
                               {"output", output}});
  });
}

sr_status sr_split(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    const auto records = sr::read_dataset(str_opt(o, "dataset"));
    const auto test_count = o.value("test_count", std::size_t{200});
    const auto split = sr::stratified_split(records, test_count, o.value("seed", std::uint64_t{0}));
    // Keep the input order in the combined file.
    std::map<std::string, sr::Split> assigned;
    for (const auto& r : split.train) assigned[r.id] = sr::Split::kTrain;
    for (const auto& r : split.test) assigned[r.id] = sr::Split::kTest;
    auto out = records;
    for (auto& r : out) r.split = assigned.at(r.id);
    const auto output = str_opt(o, "output");
    sr::write_dataset(out, output);
    put(out_json, ordered_json{{"train", split.train.size()}, {"test", split.test.size()}, {"output", output}});
  });
}

sr_status sr_stats(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    const auto stats = sr::dataset_stats(sr::read_dataset(str_opt(o, "dataset")));
    put(out_json, ordered_json{{"stats", sr::to_json(stats)}, {"text", sr::render_stats(stats)}});
  });
}

sr_status sr_train(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    const auto records = training_records(sr::read_dataset(str_opt(o, "dataset")));
    std::vector<sr::TrainConfig> configs;
    if (o.contains("members")) {
      for (const auto& m : o["members"]) configs.push_back(sr::train_config_from_json(m));
    } else {
      configs.push_back(sr::train_config_from_json(o.value("config", json::object())));
    }
    if (configs.empty()) throw sr::ArgumentError("no member configurations given");

    std::vector<sr::MemberModel> members;
    std::vector<sr::TaskRecord> tuning_split;
    ordered_json reports = ordered_json::array();
    for (const auto& c : configs) {
      auto trained = sr::train_member(c, records);
      auto rep = sr::to_json(trained.report);
      rep["name"] = c.name;
      reports.push_back(rep);
      if (tuning_split.empty()) tuning_split = trained.inner_split;
      members.push_back(std::move(trained.model));
    }

    const auto output = str_opt(o, "output");
    ordered_json result;
    result["members"] = reports;
    if (members.size() == 1) {
      sr::save_bundle(members.front(), output);
    } else {
      sr::EnsembleModel ensemble(std::move(members));
      if (o.value("tune_thresholds", false)) {
        const auto tuned = sr::tune_thresholds(ensemble, tuning_split, o.value("threshold_step", 0.05));
        ensemble.set_thresholds(tuned.thresholds);
        result["ensemble_thresholds"] = sr::to_json(tuned);
      }
      sr::save_bundle(ensemble, output);
    }
    result["output"] = output;
    if (o.contains("report")) sr::write_file_atomic(str_opt(o, "report"), result.dump(2) + "\n");
    put(out_json, result);
  });
}

sr_status sr_tune_thresholds(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    auto model = sr::load_ensemble(bundle_paths(o));
    const auto records = select_split(sr::read_dataset(str_opt(o, "dataset")), o, "all");
    const auto tuned = sr::tune_thresholds(model, records, o.value("step", 0.05));
    ordered_json result;
    result["thresholds"] = sr::to_json(tuned);

    // Optional side-by-side heldout comparison of tuned and fixed 0.5.
    if (o.contains("heldout")) {
      const auto heldout = select_split(sr::read_dataset(str_opt(o, "heldout")), o, "auto");
      auto preds = predict_all(model, heldout);
      std::vector<sr::SkillVector> truths, fixed, tuned_preds;
      for (const auto& p : preds) {
        truths.push_back(p.record.skills);
        fixed.push_back(sr::apply_thresholds(p.probabilities, sr::kDefaultThresholds));
        tuned_preds.push_back(sr::apply_thresholds(p.probabilities, tuned.thresholds));
      }
      result["heldout"] = {{"n", heldout.size()},
                           {"em_fixed_0_5", sr::exact_match(truths, fixed)},
                           {"em_tuned", sr::exact_match(truths, tuned_preds)}};
    }
    if (o.contains("output")) {
      model.set_thresholds(tuned.thresholds);
      if (model.members().size() == 1) {
        auto member = model.members().front();
        member.set_thresholds(tuned.thresholds);
        sr::save_bundle(member, str_opt(o, "output"));
      } else {
        sr::save_bundle(model, str_opt(o, "output"));
      }
      result["output"] = str_opt(o, "output");
    }
    put(out_json, result);
  });
}

sr_status sr_eval(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    std::vector<sr::PredictionRecord> preds;
    std::string name = o.value("name", std::string());
    if (o.contains("predictions") && !o.contains("bundles")) {
      preds = sr::read_predictions(str_opt(o, "predictions"));
      if (o.contains("dataset")) {
        const auto dataset = select_split(sr::read_dataset(str_opt(o, "dataset")), o, "auto");
        sr::evaluate_predictions(dataset, preds);  // validates that every record is covered
        std::map<std::string, const sr::PredictionRecord*> by_id;
        for (const auto& p : preds) by_id[p.record.id] = &p;
        std::vector<sr::PredictionRecord> joined;
        for (const auto& r : dataset) {
          auto p = *by_id.at(r.id);
          p.record = r;
          joined.push_back(std::move(p));
        }
        preds = std::move(joined);
      }
      if (name.empty()) name = "predictions";
    } else {
      const auto model = sr::load_ensemble(bundle_paths(o));
      const auto dataset = select_split(sr::read_dataset(str_opt(o, "dataset")), o, "auto");
      preds = predict_all(model, dataset);
      if (name.empty()) name = model.name();
      if (o.contains("predictions_out")) sr::write_predictions(preds, str_opt(o, "predictions_out"));
    }
    if (preds.empty()) throw sr::ArgumentError("nothing to evaluate");
    const auto report = metrics_of(preds);
    ordered_json result;
    result["name"] = name;
    result["metrics"] = sr::to_json(report);
    result["boundary"] = sr::to_json(boundary_of(preds));
    result["table"] = sr::compare_models({{name, report}});
    if (o.contains("report")) sr::write_file_atomic(str_opt(o, "report"), result.dump(2) + "\n");
    put(out_json, result);
  });
}

sr_status sr_baseline(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    const auto records = select_split(sr::read_dataset(str_opt(o, "dataset")), o, "auto");
    ordered_json result;
    if (o.contains("rescore")) {
      const auto exchanges = sr::read_exchanges(str_opt(o, "rescore"));
      std::map<std::string, sr::SkillVector> by_id;
      const auto vectors = sr::rescore_exchanges(exchanges);
      for (std::size_t i = 0; i < exchanges.size(); ++i) by_id[exchanges[i].task_id] = vectors[i];
      std::vector<sr::PredictionRecord> preds;
      for (const auto& r : records) {
        const auto it = by_id.find(r.id);
        if (it == by_id.end()) throw sr::ValidationError({"no exchange for record '" + r.id + "'"});
        sr::PredictionRecord p{r, it->second, {}};
        for (std::size_t s = 0; s < sr::kNumSkills; ++s) p.probabilities[s] = it->second.test(s) ? 1.0 : 0.0;
        preds.push_back(std::move(p));
      }
      if (o.contains("predictions")) sr::write_predictions(preds, str_opt(o, "predictions"));
      result["metrics"] = sr::to_json(metrics_of(preds));
    } else {
      const auto config = sr::baseline_config_from_json(o.value("config", json::object()));
      const auto kind = o.value("provider_kind", std::string("http"));
      auto provider = kind == "labels" ? labels_provider(records) : sr::make_provider(config.provider, kind);
      const auto run = sr::run_baseline(config, records, *provider);
      if (o.contains("exchanges")) sr::write_exchanges(run.exchanges, str_opt(o, "exchanges"));
      if (o.contains("predictions")) sr::write_predictions(run.predictions, str_opt(o, "predictions"));
      result = sr::run_summary_json(run);
    }
    const auto name = o.value("name", std::string("baseline"));
    result["table"] = sr::compare_models({{name, sr::metrics_report_from_json(result["metrics"])}});
    if (o.contains("report")) sr::write_file_atomic(str_opt(o, "report"), result.dump(2) + "\n");
    put(out_json, result);
  });
}

sr_status sr_compare(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    if (!o.contains("reports") || !o["reports"].is_array() || o["reports"].empty()) {
      throw sr::ArgumentError("option 'reports' must list at least one report");
    }
    std::vector<std::pair<std::string, sr::MetricsReport>> reports;
    for (const auto& r : o["reports"]) {
      const auto path = str_opt(r, "path");
      json doc = json::parse(sr::read_file(path), nullptr, false);
      if (doc.is_discarded()) throw sr::ValidationError({path + " is not valid JSON"});
      std::string name = r.value("name", doc.value("name", fs::path(path).stem().string()));
      const json& m = doc.contains("metrics") ? doc["metrics"] : doc;
      reports.emplace_back(name, sr::metrics_report_from_json(m));
    }
    put(out_json, ordered_json{{"table", sr::compare_models(reports)}});
  });
}

sr_status sr_latency(const char* options_json, char** out_json) {
  return guard([&] {
    const auto o = parse_options(options_json);
    const auto model = sr::load_ensemble(bundle_paths(o));
    std::vector<std::string> texts;
    if (o.contains("texts")) {
      texts = o["texts"].get<std::vector<std::string>>();
    } else {
      for (const auto& r : sr::read_dataset(str_opt(o, "dataset"))) texts.push_back(r.text);
    }
    if (texts.empty()) throw sr::ArgumentError("no texts to time");
    const auto samples = o.value("samples", texts.size());
    std::vector<std::string> timed;
    for (std::size_t i = 0; i < samples; ++i) timed.push_back(texts[i % texts.size()]);
    const auto report = sr::measure_latency(
        [&](const std::string& t) {
          sr::predict_ensemble(model, t);
          return sr::CallOutcome{};
        },
        timed, o.value("warmup", std::size_t{5}));
    auto j = sr::to_json(report);
    j["model"] = model.name();
    put(out_json, j);
  });
}

}  // extern "C"
