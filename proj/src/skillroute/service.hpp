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

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "skillroute/fleet.hpp"
#include "skillroute/model.hpp"

namespace httplib {
class Server;
}

namespace skillroute {

inline constexpr std::size_t kDefaultMaxBodyBytes = 16 * 1024;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::vector<std::filesystem::path> bundles;
  std::filesystem::path fleet_file = "fleet.json";
  std::optional<std::filesystem::path> journal_file;
  double review_threshold = kDefaultReviewThreshold;
  std::size_t max_body_bytes = kDefaultMaxBodyBytes;
  std::string log_level = "info";

  void validate() const;
};

nlohmann::ordered_json to_json(const ServiceConfig& c);
ServiceConfig service_config_from_json(const nlohmann::json& j);

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;
EnvLookup process_env();

/// SKILLROUTE_HOST, _PORT, _BUNDLES (comma separated), _FLEET, _JOURNAL,
/// _REVIEW_THRESHOLD, _MAX_BODY_BYTES and _LOG_LEVEL override the file.
void apply_env_overrides(ServiceConfig& config, const EnvLookup& env = process_env());

/// Reads the JSON config file (when given), then applies the environment.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file,
                                  const EnvLookup& env = process_env());

struct HttpResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

/// Error body: {"error": {"kind", "message", "fields": [...]}}.
HttpResponse error_response(int status, std::string_view kind, const std::string& message,
                            std::vector<std::string> fields = {});

/// Routes one request body {"text", "review_threshold"?, "skills"?}. A
/// "skills" field replaces the prediction with a human-chosen vector.
/// Throws ValidationError listing every bad field.
RoutingDecision route_request(Fleet& fleet, const EnsembleModel& model, const nlohmann::json& body,
                              double default_review_threshold);

/// The request/response logic of the HTTP API without the socket layer.
class ServiceCore {
 public:
  ServiceCore(EnsembleModel model, Fleet fleet, double review_threshold, std::size_t max_body_bytes);

  HttpResponse dispatch(const std::string& method, const std::string& path, const std::string& body);

  const EnsembleModel& model() const { return model_; }
  Fleet& fleet() { return fleet_; }

 private:
  HttpResponse predict(const std::string& body);
  HttpResponse route(const std::string& body);

  EnsembleModel model_;
  Fleet fleet_;
  double review_threshold_;
  std::size_t max_body_bytes_;
};

/// Loads bundles and the fleet, then serves the API on a background thread.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving. Returns the bound port.
  int start();
  int port() const { return port_; }
  void stop();
  /// start() then block until stop() is called from another thread.
  void run();

  ServiceCore& core() { return *core_; }

 private:
  ServiceConfig config_;
  std::unique_ptr<ServiceCore> core_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace skillroute
