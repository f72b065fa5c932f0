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

#include "skillroute/service.hpp"

#include <spdlog/spdlog.h>

#include <cctype>
#include <cstdlib>
#include <regex>

#include "httplib.h"
#include "skillroute/bundle.hpp"
#include "skillroute/dataset.hpp"
#include "skillroute/error.hpp"
#include "skillroute/hashing.hpp"

namespace skillroute {

using nlohmann::json;
using nlohmann::ordered_json;

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port must be in [0, 65535]");
  if (host.empty()) throw ConfigError("host must be non-empty");
  if (bundles.empty()) throw ConfigError("at least one model bundle is required");
  for (const auto& b : bundles) {
    if (!std::filesystem::is_directory(b)) throw ConfigError("bundle directory " + b.string() + " does not exist");
  }
  if (fleet_file.empty()) throw ConfigError("fleet file path must be non-empty");
  if (!(review_threshold >= 0.0 && review_threshold <= 1.0)) throw ConfigError("review_threshold must be in [0, 1]");
  if (max_body_bytes == 0) throw ConfigError("max_body_bytes must be positive");
  if (spdlog::level::from_str(log_level) == spdlog::level::off && log_level != "off") {
    throw ConfigError("unknown log level '" + log_level + "'");
  }
}

ordered_json to_json(const ServiceConfig& c) {
  ordered_json j;
  j["host"] = c.host;
  j["port"] = c.port;
  std::vector<std::string> bundles;
  for (const auto& b : c.bundles) bundles.push_back(b.string());
  j["bundles"] = bundles;
  j["fleet"] = c.fleet_file.string();
  j["journal"] = c.journal_file ? ordered_json(c.journal_file->string()) : ordered_json(nullptr);
  j["review_threshold"] = c.review_threshold;
  j["max_body_bytes"] = c.max_body_bytes;
  j["log_level"] = c.log_level;
  return j;
}

ServiceConfig service_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("service config must be a JSON object");
  static const std::vector<std::string> known = {"host",    "port",           "bundles",        "fleet",
                                                 "journal", "review_threshold", "max_body_bytes", "log_level"};
  for (const auto& [k, v] : j.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
  }
  ServiceConfig c;
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    if (j.contains("bundles")) {
      for (const auto& b : j["bundles"]) c.bundles.emplace_back(b.get<std::string>());
    }
    if (j.contains("fleet")) c.fleet_file = j["fleet"].get<std::string>();
    if (j.contains("journal") && !j["journal"].is_null()) c.journal_file = j["journal"].get<std::string>();
    c.review_threshold = j.value("review_threshold", c.review_threshold);
    c.max_body_bytes = j.value("max_body_bytes", c.max_body_bytes);
    c.log_level = j.value("log_level", c.log_level);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed service config: ") + e.what());
  }
  return c;
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

namespace {

template <typename T>
T parse_number(const std::string& name, const std::string& text) {
  try {
    std::size_t used = 0;
    T v;
    if constexpr (std::is_floating_point_v<T>) {
      v = static_cast<T>(std::stod(text, &used));
    } else {
      v = static_cast<T>(std::stoll(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(name + " is not a number: '" + text + "'");
  }
}

}  // namespace

void apply_env_overrides(ServiceConfig& c, const EnvLookup& env) {
  if (auto v = env("SKILLROUTE_HOST")) c.host = *v;
  if (auto v = env("SKILLROUTE_PORT")) c.port = parse_number<int>("SKILLROUTE_PORT", *v);
  if (auto v = env("SKILLROUTE_BUNDLES")) {
    c.bundles.clear();
    std::size_t start = 0;
    while (start <= v->size()) {
      auto end = v->find(',', start);
      if (end == std::string::npos) end = v->size();
      if (end > start) c.bundles.emplace_back(v->substr(start, end - start));
      start = end + 1;
    }
  }
  if (auto v = env("SKILLROUTE_FLEET")) c.fleet_file = *v;
  if (auto v = env("SKILLROUTE_JOURNAL")) c.journal_file = *v;
  if (auto v = env("SKILLROUTE_REVIEW_THRESHOLD")) {
    c.review_threshold = parse_number<double>("SKILLROUTE_REVIEW_THRESHOLD", *v);
  }
  if (auto v = env("SKILLROUTE_MAX_BODY_BYTES")) {
    c.max_body_bytes = parse_number<std::size_t>("SKILLROUTE_MAX_BODY_BYTES", *v);
  }
  if (auto v = env("SKILLROUTE_LOG_LEVEL")) c.log_level = *v;
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  ServiceConfig c;
  if (file) {
    const json j = json::parse(read_file(*file), nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file " + file->string() + " is not valid JSON");
    c = service_config_from_json(j);
  }
  apply_env_overrides(c, env);
  return c;
}

HttpResponse error_response(int status, std::string_view kind, const std::string& message,
                            std::vector<std::string> fields) {
  ordered_json e;
  e["kind"] = kind;
  e["message"] = message;
  e["fields"] = fields;
  return {status, {{"error", e}}};
}

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument:
    case ErrorKind::kValidation:
    case ErrorKind::kParse:
      return 400;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
    case ErrorKind::kState:
      return 409;
    default:
      return 500;
  }
}

json parse_body(const std::string& body, std::initializer_list<std::string_view> allowed) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ValidationError({"body must be a JSON object"});
  std::vector<std::string> fields;
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fields.push_back("unexpected field '" + k + "'");
  }
  if (!fields.empty()) throw ValidationError(std::move(fields));
  return j;
}

std::string required_text(const json& j) {
  if (!j.contains("text") || !j["text"].is_string()) throw ValidationError({"text must be a string"});
  auto text = j["text"].get<std::string>();
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    throw ValidationError({"text must be non-empty"});
  }
  return text;
}

SkillVector skills_field(const json& v) {
  SkillVector out;
  if (v.is_array()) {
    std::vector<std::string> names;
    for (const auto& n : v) {
      if (!n.is_string()) throw ValidationError({"skills entries must be strings"});
      names.push_back(n.get<std::string>());
    }
    try {
      return skill_vector_from_names(names);
    } catch (const ValidationError& e) {
      throw;
    }
  }
  if (!v.is_object()) throw ValidationError({"skills must be an object of six booleans or a list of names"});
  std::vector<std::string> fields;
  for (Skill s : kAllSkills) {
    const std::string key(skill_key(s));
    if (!v.contains(key) || !v[key].is_boolean()) {
      fields.push_back("skills." + key + " must be a boolean");
      continue;
    }
    out.set(s, v[key].get<bool>());
  }
  for (const auto& [k, x] : v.items()) {
    if (!parse_skill(k) || std::string(skill_key(*parse_skill(k))) != k) fields.push_back("unexpected field 'skills." + k + "'");
  }
  if (!fields.empty()) throw ValidationError(std::move(fields));
  return out;
}

}  // namespace

ServiceCore::ServiceCore(EnsembleModel model, Fleet fleet, double review_threshold, std::size_t max_body_bytes)
    : model_(std::move(model)),
      fleet_(std::move(fleet)),
      review_threshold_(review_threshold),
      max_body_bytes_(max_body_bytes) {
  if (model_.members().empty()) throw ConfigError("service needs a loaded model");
}

HttpResponse ServiceCore::predict(const std::string& body) {
  const auto j = parse_body(body, {"text"});
  const auto text = required_text(j);
  const auto r = predict_ensemble(model_, text);
  ordered_json out;
  out["skills"] = skills_to_json(r.skills);
  out["probabilities"] = r.probabilities;
  out["model"] = model_.name();
  return {200, out};
}

RoutingDecision route_request(Fleet& fleet, const EnsembleModel& model, const json& body,
                              double default_review_threshold) {
  if (!body.is_object()) throw ValidationError({"body must be a JSON object"});
  std::vector<std::string> fields;
  for (const auto& [k, v] : body.items()) {
    if (k != "text" && k != "review_threshold" && k != "skills") fields.push_back("unexpected field '" + k + "'");
  }
  if (!fields.empty()) throw ValidationError(std::move(fields));
  const auto text = required_text(body);
  RoutingPolicy policy;
  policy.review_threshold = default_review_threshold;
  if (body.contains("review_threshold")) {
    const auto& t = body["review_threshold"];
    if (!t.is_number() || t.get<double>() < 0.0 || t.get<double>() > 1.0) {
      throw ValidationError({"review_threshold must be a number in [0, 1]"});
    }
    policy.review_threshold = t.get<double>();
  }
  if (body.contains("skills")) {
    const auto required = skills_field(body["skills"]);
    const auto p = predict_ensemble(model, text);
    return fleet.route_required(text, required, p.probabilities, policy, true);
  }
  return fleet.route(text, model, policy);
}

HttpResponse ServiceCore::route(const std::string& body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ValidationError({"body must be a JSON object"});
  return {200, to_json(route_request(fleet_, model_, j, review_threshold_))};
}

HttpResponse ServiceCore::dispatch(const std::string& method, const std::string& path, const std::string& body) {
  static const std::regex robot_path(R"(^/v1/fleet/robots/([A-Za-z0-9._-]+)$)");
  static const std::regex assignment_path(R"(^/v1/assignments/([A-Za-z0-9._-]+)/(confirm|release)$)");
  if (body.size() > max_body_bytes_) {
    return error_response(413, "payload_too_large",
                          "request body exceeds " + std::to_string(max_body_bytes_) + " bytes");
  }
  try {
    std::smatch m;
    if (path == "/v1/healthz") {
      if (method != "GET") return error_response(405, "method_not_allowed", "use GET");
      return {200, ordered_json{{"status", "ok"}, {"model", model_.name()}}};
    }
    if (path == "/v1/predict") {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
      return predict(body);
    }
    if (path == "/v1/route") {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
      return route(body);
    }
    if (path == "/v1/fleet") {
      if (method != "GET") return error_response(405, "method_not_allowed", "use GET");
      return {200, to_json(fleet_.snapshot())};
    }
    if (path == "/v1/fleet/robots") {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
      const json j = json::parse(body, nullptr, false);
      if (j.is_discarded()) throw ValidationError({"body must be a JSON object"});
      return {201, to_json(fleet_.add_robot(robot_from_json(j)))};
    }
    if (std::regex_match(path, m, robot_path)) {
      if (method != "DELETE") return error_response(405, "method_not_allowed", "use DELETE");
      fleet_.remove_robot(m[1].str());
      return {200, ordered_json{{"removed", m[1].str()}}};
    }
    if (std::regex_match(path, m, assignment_path)) {
      if (method != "POST") return error_response(405, "method_not_allowed", "use POST");
      const auto result = m[2].str() == "confirm" ? fleet_.confirm(m[1].str()) : fleet_.release(m[1].str());
      ordered_json out;
      out["assignment"] = to_json(result.assignment);
      out["warning"] = result.warning ? ordered_json(*result.warning) : ordered_json(nullptr);
      if (result.warning) spdlog::warn("{}", *result.warning);
      return {200, out};
    }
    return error_response(404, "not_found", "no route for " + method + " " + path);
  } catch (const ValidationError& e) {
    return error_response(400, "validation", e.what(), e.violations());
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    spdlog::error("unhandled error on {} {}: {}", method, path, e.what());
    return error_response(500, "internal", e.what());
  }
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  config_.validate();
  spdlog::set_level(spdlog::level::from_str(config_.log_level));
  auto model = load_ensemble(config_.bundles);
  auto fleet = Fleet::open(config_.fleet_file, config_.journal_file);
  spdlog::info("loaded model '{}' with {} member(s); fleet has {} robot(s)", model.name(), model.members().size(),
               fleet.snapshot().robots.size());
  core_ = std::make_unique<ServiceCore>(std::move(model), std::move(fleet), config_.review_threshold,
                                        config_.max_body_bytes);
}

Service::~Service() { stop(); }

int Service::start() {
  if (server_) throw StateError("service already started");
  server_ = std::make_unique<httplib::Server>();
  server_->set_payload_max_length(config_.max_body_bytes);
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = core_->dispatch(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
    spdlog::info("{} {} -> {}", req.method, req.path, r.status);
  };
  const std::string any = R"(/.*)";
  server_->Get(any, handler);
  server_->Post(any, handler);
  server_->Delete(any, handler);
  server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    HttpResponse r = res.status == 413 ? error_response(413, "payload_too_large", "request body too large")
                                       : error_response(res.status, "error", "request failed");
    res.set_content(r.body.dump(), "application/json");
    spdlog::info("{} {} -> {}", req.method, req.path, res.status);
  });

  port_ = config_.port == 0 ? server_->bind_to_any_port(config_.host) : config_.port;
  if (config_.port != 0 && !server_->bind_to_port(config_.host, config_.port)) port_ = -1;
  if (port_ <= 0) {
    server_.reset();
    throw IoError("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  spdlog::info("listening on {}:{}", config_.host, port_);
  return port_;
}

void Service::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

void Service::run() {
  start();
  if (thread_.joinable()) thread_.join();
}

}  // namespace skillroute
