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

// skillroute command line. Every subcommand builds a JSON options object and
// calls the C library; exit codes are 0 on success, 1 on a domain error and
// 2 on a usage error.

#include <csignal>
#include <fstream>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skillroute/skillroute.h"

using nlohmann::json;

namespace {

constexpr int kExitDomain = 1;

struct CString {
  char* p = nullptr;
  ~CString() { sr_string_free(p); }
};

int fail(sr_status s) {
  std::cerr << "error (" << sr_status_name(s) << "): " << sr_last_error() << "\n";
  return kExitDomain;
}

using JsonOp = sr_status (*)(const char*, char**);

// Runs `op` and prints either one string field of the result or the whole
// document.
int run_op(JsonOp op, const json& options, const std::string& text_field = "") {
  CString out;
  const auto s = op(options.dump().c_str(), &out.p);
  if (s != SR_OK) return fail(s);
  const json result = json::parse(out.p);
  if (!text_field.empty() && result.contains(text_field)) {
    std::cout << result[text_field].get<std::string>();
  } else {
    std::cout << result.dump(2) << "\n";
  }
  return 0;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

json read_json_arg(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
  return json::parse(in);
}

sr_service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service) sr_service_stop(g_service);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skillroute: task-to-skill prediction and robot fleet routing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sr_version()));

  std::function<int()> action;

  // generate
  std::string gen_config, gen_output, gen_report;
  auto* gen = app.add_subcommand("generate", "Run the chained generation pipeline");
  gen->add_option("--config", gen_config, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--output", gen_output, "Output dataset (JSONL)")->required();
  gen->add_option("--report", gen_report, "Write the run report here");
  gen->callback([&] {
    action = [&] {
      json o{{"config", gen_config}, {"output", gen_output}};
      if (!gen_report.empty()) o["report"] = gen_report;
      return run_op(sr_generate, o);
    };
  });

  // boundary
  std::string b_a = "legs", b_b = "wheels", b_output, b_provider, b_kind = "http", b_cue_a, b_cue_b, b_cue_both;
  std::size_t b_a_only = 0, b_b_only = 0, b_both = 0;
  int b_parallel = 4;
  auto* bnd = app.add_subcommand("boundary", "Generate boundary tasks for a confusable skill pair");
  bnd->add_option("--a", b_a, "First skill")->capture_default_str();
  bnd->add_option("--b", b_b, "Second skill")->capture_default_str();
  bnd->add_option("--a-only", b_a_only, "Tasks needing only the first skill")->capture_default_str();
  bnd->add_option("--b-only", b_b_only, "Tasks needing only the second skill")->capture_default_str();
  bnd->add_option("--both", b_both, "Tasks needing both skills")->capture_default_str();
  bnd->add_option("--cue-a", b_cue_a, "Cue for the first arm");
  bnd->add_option("--cue-b", b_cue_b, "Cue for the second arm");
  bnd->add_option("--cue-both", b_cue_both, "Cue for the combined arm");
  bnd->add_option("--provider", b_provider, "Provider profile JSON file")->check(CLI::ExistingFile);
  bnd->add_option("--provider-kind", b_kind, "http, fixture or fixture:<seed>")->capture_default_str();
  bnd->add_option("--parallelism", b_parallel, "Concurrent provider calls")->capture_default_str();
  bnd->add_option("--output", b_output, "Output dataset (JSONL)")->required();
  bnd->callback([&] {
    action = [&] {
      json o{{"a", b_a},         {"b", b_b},           {"a_only", b_a_only},       {"b_only", b_b_only},
             {"both", b_both},   {"provider_kind", b_kind}, {"parallelism", b_parallel}, {"output", b_output}};
      if (!b_cue_a.empty()) o["cue_a"] = b_cue_a;
      if (!b_cue_b.empty()) o["cue_b"] = b_cue_b;
      if (!b_cue_both.empty()) o["cue_both"] = b_cue_both;
      if (!b_provider.empty()) o["provider"] = read_json_arg(b_provider);
      return run_op(sr_boundary, o);
    };
  });

  // audit sample|apply
  auto* audit = app.add_subcommand("audit", "Human audit worksheets");
  audit->require_subcommand(1);
  std::string a_dataset, a_output, a_worksheet;
  std::size_t a_n = 100;
  std::uint64_t a_seed = 0;
  auto* a_sample = audit->add_subcommand("sample", "Write a worksheet for a seeded random sample");
  a_sample->add_option("--dataset", a_dataset, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  a_sample->add_option("--n", a_n, "Sample size")->capture_default_str();
  a_sample->add_option("--seed", a_seed, "Sampling seed")->capture_default_str();
  a_sample->add_option("--output", a_output, "Worksheet (JSONL)")->required();
  a_sample->callback([&] {
    action = [&] {
      return run_op(sr_audit_sample, {{"dataset", a_dataset}, {"n", a_n}, {"seed", a_seed}, {"output", a_output}});
    };
  });
  auto* a_apply = audit->add_subcommand("apply", "Apply worksheet verdicts to a dataset");
  a_apply->add_option("--dataset", a_dataset, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  a_apply->add_option("--worksheet", a_worksheet, "Filled worksheet")->required()->check(CLI::ExistingFile);
  a_apply->add_option("--output", a_output, "Audited dataset (JSONL)")->required();
  a_apply->callback([&] {
    action = [&] {
      return run_op(sr_audit_apply, {{"dataset", a_dataset}, {"worksheet", a_worksheet}, {"output", a_output}});
    };
  });

  // split
  std::string s_dataset, s_output;
  std::size_t s_test = 200;
  std::uint64_t s_seed = 0;
  auto* split = app.add_subcommand("split", "Stratified train/test split by skill combination");
  split->add_option("--dataset", s_dataset, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  split->add_option("--test-count", s_test, "Records in the test split")->capture_default_str();
  split->add_option("--seed", s_seed, "Split seed")->capture_default_str();
  split->add_option("--output", s_output, "Dataset with split fields set")->required();
  split->callback([&] {
    action = [&] {
      return run_op(sr_split, {{"dataset", s_dataset}, {"test_count", s_test}, {"seed", s_seed}, {"output", s_output}});
    };
  });

  // stats
  std::string st_dataset;
  bool st_json = false;
  auto* stats = app.add_subcommand("stats", "Per-skill and per-combination counts");
  stats->add_option("dataset", st_dataset, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  stats->add_flag("--json", st_json, "Print JSON instead of a table");
  stats->callback([&] {
    action = [&] { return run_op(sr_stats, {{"dataset", st_dataset}}, st_json ? "" : "text"); };
  });

  // train
  std::string t_dataset, t_output, t_config, t_report, t_backend = "hashing-bow", t_name = "member";
  std::uint64_t t_seed = 0;
  std::size_t t_epochs = 200, t_batch = 32, t_blocks = 2, t_patience = 20;
  double t_lr_head = 1e-3, t_lr_enc = 2e-5, t_wd = 0.01, t_dropout = 0.3, t_inner = 0.15, t_step = 0.05;
  bool t_tune = false;
  auto* train = app.add_subcommand("train", "Train a member model (or an ensemble from --config)");
  train->add_option("--dataset", t_dataset, "Training dataset (test-split records are skipped)")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--output", t_output, "Bundle directory")->required();
  train->add_option("--config", t_config, "JSON with a 'members' list of train configs")->check(CLI::ExistingFile);
  train->add_option("--name", t_name, "Member name")->capture_default_str();
  train->add_option("--backend", t_backend, "Encoder backend")->capture_default_str();
  train->add_option("--seed", t_seed, "Seed")->capture_default_str();
  train->add_option("--epochs", t_epochs, "Maximum epochs")->capture_default_str();
  train->add_option("--batch-size", t_batch, "Batch size")->capture_default_str();
  train->add_option("--lr-head", t_lr_head, "Head learning rate")->capture_default_str();
  train->add_option("--lr-encoder", t_lr_enc, "Unfrozen block learning rate")->capture_default_str();
  train->add_option("--weight-decay", t_wd, "Decoupled weight decay")->capture_default_str();
  train->add_option("--unfrozen-blocks", t_blocks, "Trainable top encoder blocks")->capture_default_str();
  train->add_option("--dropout", t_dropout, "Head dropout")->capture_default_str();
  train->add_option("--inner-fraction", t_inner, "Inner validation fraction")->capture_default_str();
  train->add_option("--patience", t_patience, "Early-stop patience in epochs")->capture_default_str();
  train->add_flag("--tune-thresholds", t_tune, "Tune per-skill thresholds on the inner split");
  train->add_option("--threshold-step", t_step, "Threshold grid step")->capture_default_str();
  train->add_option("--report", t_report, "Write the training report here");
  train->callback([&] {
    action = [&] {
      json o{{"dataset", t_dataset}, {"output", t_output}};
      if (!t_config.empty()) {
        const json c = read_json_arg(t_config);
        for (const auto& [k, v] : c.items()) o[k] = v;
      } else {
        o["config"] = {{"name", t_name},         {"backend", t_backend},
                       {"seed", t_seed},         {"epochs", t_epochs},
                       {"batch_size", t_batch},  {"lr_head", t_lr_head},
                       {"lr_encoder", t_lr_enc}, {"weight_decay", t_wd},
                       {"unfrozen_blocks", t_blocks}, {"dropout", t_dropout},
                       {"inner_fraction", t_inner},   {"patience", t_patience},
                       {"tune_thresholds", t_tune},   {"threshold_step", t_step}};
      }
      if (!t_report.empty()) o["report"] = t_report;
      return run_op(sr_train, o);
    };
  });

  // tune-thresholds
  std::vector<std::string> bundles;
  std::string tt_dataset, tt_heldout, tt_output, tt_split = "all";
  double tt_step = 0.05;
  auto* tune = app.add_subcommand("tune-thresholds", "Per-skill threshold search on a tuning split");
  tune->add_option("--bundle", bundles, "Model bundle(s)")->required();
  tune->add_option("--dataset", tt_dataset, "Tuning records")->required()->check(CLI::ExistingFile);
  tune->add_option("--split", tt_split, "train, test, all or auto")->capture_default_str();
  tune->add_option("--step", tt_step, "Grid step (0.5 is always included)")->capture_default_str();
  tune->add_option("--heldout", tt_heldout, "Also report heldout EM for tuned vs 0.5")->check(CLI::ExistingFile);
  tune->add_option("--output", tt_output, "Write a bundle with the tuned thresholds");
  tune->callback([&] {
    action = [&] {
      json o{{"bundles", bundles}, {"dataset", tt_dataset}, {"split", tt_split}, {"step", tt_step}};
      if (!tt_heldout.empty()) o["heldout"] = tt_heldout;
      if (!tt_output.empty()) o["output"] = tt_output;
      return run_op(sr_tune_thresholds, o);
    };
  });

  // eval
  std::string e_dataset, e_predictions, e_pred_out, e_report, e_name, e_split = "auto";
  bool e_json = false;
  auto* ev = app.add_subcommand("eval", "Score predictions or a model against labels");
  ev->add_option("--dataset", e_dataset, "Labelled dataset")->check(CLI::ExistingFile);
  ev->add_option("--predictions", e_predictions, "Predictions file to score")->check(CLI::ExistingFile);
  ev->add_option("--bundle", bundles, "Model bundle(s) to run instead of a predictions file");
  ev->add_option("--split", e_split, "train, test, all or auto")->capture_default_str();
  ev->add_option("--predictions-out", e_pred_out, "Write model predictions here");
  ev->add_option("--report", e_report, "Write the metrics report here");
  ev->add_option("--name", e_name, "Row label");
  ev->add_flag("--json", e_json, "Print the full JSON result");
  ev->callback([&] {
    action = [&] {
      if (e_predictions.empty() == bundles.empty()) {
        throw CLI::ValidationError("eval", "give exactly one of --predictions or --bundle");
      }
      if (!bundles.empty() && e_dataset.empty()) throw CLI::ValidationError("eval", "--bundle needs --dataset");
      json o{{"split", e_split}};
      if (!e_dataset.empty()) o["dataset"] = e_dataset;
      if (!e_predictions.empty()) o["predictions"] = e_predictions;
      if (!bundles.empty()) o["bundles"] = bundles;
      if (!e_pred_out.empty()) o["predictions_out"] = e_pred_out;
      if (!e_report.empty()) o["report"] = e_report;
      if (!e_name.empty()) o["name"] = e_name;
      return run_op(sr_eval, o, e_json ? "" : "table");
    };
  });

  // baseline
  std::string bl_dataset, bl_config, bl_kind = "http", bl_exchanges, bl_predictions, bl_report, bl_rescore,
                                     bl_name = "baseline", bl_split = "auto";
  bool bl_json = false;
  auto* bl = app.add_subcommand("baseline", "Zero-shot LLM baseline run or offline re-score");
  bl->add_option("--dataset", bl_dataset, "Labelled dataset")->required()->check(CLI::ExistingFile);
  bl->add_option("--split", bl_split, "train, test, all or auto")->capture_default_str();
  bl->add_option("--config", bl_config, "Baseline config JSON")->check(CLI::ExistingFile);
  bl->add_option("--provider-kind", bl_kind, "http, or labels for an offline smoke run")->capture_default_str();
  bl->add_option("--exchanges", bl_exchanges, "Write the exchange log here");
  bl->add_option("--rescore", bl_rescore, "Re-score an existing exchange log instead of calling")
      ->check(CLI::ExistingFile);
  bl->add_option("--predictions", bl_predictions, "Write predictions here");
  bl->add_option("--report", bl_report, "Write the run report here");
  bl->add_option("--name", bl_name, "Row label")->capture_default_str();
  bl->add_flag("--json", bl_json, "Print the full JSON result");
  bl->callback([&] {
    action = [&] {
      json o{{"dataset", bl_dataset}, {"split", bl_split}, {"provider_kind", bl_kind}, {"name", bl_name}};
      if (!bl_config.empty()) o["config"] = read_json_arg(bl_config);
      if (!bl_exchanges.empty()) o["exchanges"] = bl_exchanges;
      if (!bl_rescore.empty()) o["rescore"] = bl_rescore;
      if (!bl_predictions.empty()) o["predictions"] = bl_predictions;
      if (!bl_report.empty()) o["report"] = bl_report;
      return run_op(sr_baseline, o, bl_json ? "" : "table");
    };
  });

  // compare
  std::vector<std::string> c_reports;
  auto* cmp = app.add_subcommand("compare", "Side-by-side tables from metrics reports");
  cmp->add_option("reports", c_reports, "Report files, optionally NAME=PATH")->required();
  cmp->callback([&] {
    action = [&] {
      json list = json::array();
      for (const auto& r : c_reports) {
        const auto eq = r.find('=');
        if (eq == std::string::npos) {
          list.push_back({{"path", r}});
        } else {
          list.push_back({{"name", r.substr(0, eq)}, {"path", r.substr(eq + 1)}});
        }
      }
      return run_op(sr_compare, {{"reports", list}}, "table");
    };
  });

  // latency
  std::string l_dataset;
  std::vector<std::string> l_texts;
  std::size_t l_samples = 200, l_warmup = 5;
  auto* lat = app.add_subcommand("latency", "Sequential single-sample inference timing");
  lat->add_option("--bundle", bundles, "Model bundle(s)")->required();
  lat->add_option("--dataset", l_dataset, "Texts to time")->check(CLI::ExistingFile);
  lat->add_option("--text", l_texts, "Text to time (repeatable)");
  lat->add_option("--samples", l_samples, "Timed calls")->capture_default_str();
  lat->add_option("--warmup", l_warmup, "Untimed warmup calls")->capture_default_str();
  lat->callback([&] {
    action = [&] {
      json o{{"bundles", bundles}, {"samples", l_samples}, {"warmup", l_warmup}};
      if (!l_texts.empty()) {
        o["texts"] = l_texts;
      } else if (!l_dataset.empty()) {
        o["dataset"] = l_dataset;
      } else {
        throw CLI::ValidationError("latency", "give --dataset or --text");
      }
      return run_op(sr_latency, o);
    };
  });

  // fleet add|list|rm|confirm|release
  std::string f_file = "fleet.json", f_journal, f_id, f_type, f_skills, f_assignment;
  bool f_unavailable = false;
  auto* fleet = app.add_subcommand("fleet", "Fleet registry and assignments");
  fleet->require_subcommand(1);
  fleet->add_option("--fleet", f_file, "Fleet file")->capture_default_str();
  fleet->add_option("--journal", f_journal, "Assignment journal (default: <fleet>.journal)");

  auto open_fleet = [&](sr_fleet** f) {
    return sr_fleet_open(f_file.c_str(), f_journal.empty() ? nullptr : f_journal.c_str(), f);
  };

  auto* f_add = fleet->add_subcommand("add", "Register a robot");
  f_add->add_option("--id", f_id, "Robot id")->required();
  f_add->add_option("--type", f_type, "Robot type, e.g. drone");
  f_add->add_option("--skills", f_skills, "Comma-separated skills the robot has");
  f_add->add_flag("--unavailable", f_unavailable, "Register as unavailable");
  f_add->callback([&] {
    action = [&] {
      sr_fleet* f = nullptr;
      if (auto s = open_fleet(&f); s != SR_OK) return fail(s);
      const json robot{{"id", f_id}, {"type", f_type}, {"skills", split_csv(f_skills)}, {"available", !f_unavailable}};
      CString out;
      const auto s = sr_fleet_add_robot(f, robot.dump().c_str(), &out.p);
      sr_fleet_free(f);
      if (s != SR_OK) return fail(s);
      std::cout << json::parse(out.p).dump(2) << "\n";
      return 0;
    };
  });
  auto* f_list = fleet->add_subcommand("list", "Print the fleet snapshot");
  f_list->callback([&] {
    action = [&] {
      sr_fleet* f = nullptr;
      if (auto s = open_fleet(&f); s != SR_OK) return fail(s);
      CString out;
      const auto s = sr_fleet_snapshot(f, &out.p);
      sr_fleet_free(f);
      if (s != SR_OK) return fail(s);
      std::cout << json::parse(out.p).dump(2) << "\n";
      return 0;
    };
  });
  auto* f_rm = fleet->add_subcommand("rm", "Remove a robot");
  f_rm->add_option("--id", f_id, "Robot id")->required();
  f_rm->callback([&] {
    action = [&] {
      sr_fleet* f = nullptr;
      if (auto s = open_fleet(&f); s != SR_OK) return fail(s);
      const auto s = sr_fleet_remove_robot(f, f_id.c_str());
      sr_fleet_free(f);
      if (s != SR_OK) return fail(s);
      std::cout << json{{"removed", f_id}}.dump(2) << "\n";
      return 0;
    };
  });
  for (const std::string verb : {"confirm", "release"}) {
    auto* sub = fleet->add_subcommand(verb, verb == "confirm" ? "Confirm a proposed assignment"
                                                              : "Release or cancel an assignment");
    sub->add_option("--assignment", f_assignment, "Assignment id")->required();
    sub->callback([&, verb] {
      action = [&, verb] {
        sr_fleet* f = nullptr;
        if (auto s = open_fleet(&f); s != SR_OK) return fail(s);
        CString out;
        const auto s = verb == "confirm" ? sr_fleet_confirm(f, f_assignment.c_str(), &out.p)
                                         : sr_fleet_release(f, f_assignment.c_str(), &out.p);
        sr_fleet_free(f);
        if (s != SR_OK) return fail(s);
        const json r = json::parse(out.p);
        if (!r["warning"].is_null()) std::cerr << "warning: " << r["warning"].get<std::string>() << "\n";
        std::cout << r.dump(2) << "\n";
        return 0;
      };
    });
  }

  // route
  std::string r_text, r_skills;
  double r_threshold = 0.65;
  auto* route = app.add_subcommand("route", "Predict skills for a task and route it to a robot");
  route->add_option("--text", r_text, "Task description")->required();
  route->add_option("--bundle", bundles, "Model bundle(s)")->required();
  route->add_option("--fleet", f_file, "Fleet file")->capture_default_str();
  route->add_option("--journal", f_journal, "Assignment journal (default: <fleet>.journal)");
  route->add_option("--review-threshold", r_threshold, "Minimum probability on each required skill")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  route->add_option("--skills", r_skills, "Comma-separated override of the predicted skills");
  route->callback([&] {
    action = [&] {
      std::vector<const char*> paths;
      for (const auto& b : bundles) paths.push_back(b.c_str());
      sr_model* m = nullptr;
      if (auto s = sr_model_load(paths.data(), paths.size(), &m); s != SR_OK) return fail(s);
      sr_fleet* f = nullptr;
      if (auto s = open_fleet(&f); s != SR_OK) {
        sr_model_free(m);
        return fail(s);
      }
      json req{{"text", r_text}, {"review_threshold", r_threshold}};
      if (!r_skills.empty()) req["skills"] = split_csv(r_skills);
      CString out;
      const auto s = sr_fleet_route(f, m, req.dump().c_str(), &out.p);
      sr_fleet_free(f);
      sr_model_free(m);
      if (s != SR_OK) return fail(s);
      std::cout << json::parse(out.p).dump(2) << "\n";
      return 0;
    };
  });

  // serve
  std::string v_config, v_host, v_journal, v_level;
  std::string v_fleet;
  int v_port = -1;
  double v_threshold = -1.0;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", v_config, "Service config JSON (SKILLROUTE_* env vars override it)")
      ->check(CLI::ExistingFile);
  serve->add_option("--host", v_host, "Bind address [127.0.0.1]");
  serve->add_option("--port", v_port, "Port, 0 for any free port [8080]")->check(CLI::Range(0, 65535));
  serve->add_option("--bundle", bundles, "Model bundle(s)");
  serve->add_option("--fleet", v_fleet, "Fleet file [fleet.json]");
  serve->add_option("--journal", v_journal, "Assignment journal");
  serve->add_option("--review-threshold", v_threshold, "Default review threshold [0.65]")
      ->check(CLI::Range(0.0, 1.0));
  serve->add_option("--log-level", v_level, "trace, debug, info, warn, err, critical or off [info]");
  serve->callback([&] {
    action = [&] {
      json o = json::object();
      if (!v_host.empty()) o["host"] = v_host;
      if (v_port >= 0) o["port"] = v_port;
      if (!bundles.empty()) o["bundles"] = bundles;
      if (!v_fleet.empty()) o["fleet"] = v_fleet;
      if (!v_journal.empty()) o["journal"] = v_journal;
      if (v_threshold >= 0) o["review_threshold"] = v_threshold;
      if (!v_level.empty()) o["log_level"] = v_level;
      sr_service* svc = nullptr;
      const auto s = sr_service_create(v_config.empty() ? nullptr : v_config.c_str(), o.dump().c_str(), &svc);
      if (s != SR_OK) return fail(s);
      g_service = svc;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const auto r = sr_service_run(svc);
      g_service = nullptr;
      sr_service_free(svc);
      return r == SR_OK ? 0 : fail(r);
    };
  });

  try {
    app.parse(argc, argv);
    return action ? action() : 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
