/*
 * Copyright 2026 The SkillRoute Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SKILLROUTE_SKILLROUTE_H_
#define SKILLROUTE_SKILLROUTE_H_

/*
 * C interface to the skillroute library.
 *
 * Conventions:
 *  - Every fallible call returns an sr_status. On failure the message is
 *    available from sr_last_error() on the same thread until the next call.
 *  - Strings returned through `char**` are heap-allocated UTF-8 and must be
 *    released with sr_string_free().
 *  - Handles are opaque and released with their matching *_free function.
 *    Passing NULL to a free function is a no-op.
 *  - Structured inputs and outputs are JSON documents.
 */

#include <stddef.h>

#if defined(_WIN32)
#define SR_API __declspec(dllexport)
#elif defined(SKILLROUTE_BUILDING_LIBRARY)
#define SR_API __attribute__((visibility("default")))
#else
#define SR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sr_status {
  SR_OK = 0,
  SR_ERR_ARGUMENT = 1,
  SR_ERR_VALIDATION = 2,
  SR_ERR_IO = 3,
  SR_ERR_INTEGRITY = 4,
  SR_ERR_NOT_FOUND = 5,
  SR_ERR_CONFLICT = 6,
  SR_ERR_STATE = 7,
  SR_ERR_TRANSPORT = 8,
  SR_ERR_PARSE = 9,
  SR_ERR_CONFIG = 10,
  SR_ERR_TRAINING = 11,
  SR_ERR_GENERATION_FAILED = 12,
  SR_ERR_INTERNAL = 99
} sr_status;

SR_API const char* sr_version(void);
/* Stable snake_case name, e.g. "not_found". */
SR_API const char* sr_status_name(sr_status status);
/* Message of the last failure on this thread; "" when none. */
SR_API const char* sr_last_error(void);
SR_API void sr_string_free(char* s);

/* ---- models ----------------------------------------------------------- */

typedef struct sr_model sr_model;

/* One bundle keeps its own thresholds; several are pooled into an ensemble. */
SR_API sr_status sr_model_load(const char* const* bundle_dirs, size_t count, sr_model** out);
SR_API void sr_model_free(sr_model* model);
SR_API sr_status sr_model_name(const sr_model* model, char** out);
/* {"skills": {...}, "probabilities": [6], "member_probabilities": [[6]...],
 *  "latency_ms": x, "truncated": bool, "model": name} */
SR_API sr_status sr_model_predict(const sr_model* model, const char* text, char** out_json);

/* ---- fleet ------------------------------------------------------------ */

typedef struct sr_fleet sr_fleet;

/* `journal` may be NULL for "<fleet_file>.journal". */
SR_API sr_status sr_fleet_open(const char* fleet_file, const char* journal, sr_fleet** out);
SR_API void sr_fleet_free(sr_fleet* fleet);
SR_API sr_status sr_fleet_snapshot(const sr_fleet* fleet, char** out_json);
SR_API sr_status sr_fleet_assignments(const sr_fleet* fleet, char** out_json);
SR_API sr_status sr_fleet_add_robot(sr_fleet* fleet, const char* robot_json, char** out_json);
SR_API sr_status sr_fleet_remove_robot(sr_fleet* fleet, const char* robot_id);
/* `request_json` has the same shape as the HTTP route body:
 * {"text": ..., "review_threshold"?: x, "skills"?: {...} | [names]}. */
SR_API sr_status sr_fleet_route(sr_fleet* fleet, const sr_model* model, const char* request_json, char** out_json);
SR_API sr_status sr_fleet_confirm(sr_fleet* fleet, const char* assignment_id, char** out_json);
SR_API sr_status sr_fleet_release(sr_fleet* fleet, const char* assignment_id, char** out_json);

/* ---- service ---------------------------------------------------------- */

typedef struct sr_service sr_service;

/* Configuration precedence: config file (may be NULL), then SKILLROUTE_*
 * environment variables, then `overrides_json` (may be NULL). */
SR_API sr_status sr_service_create(const char* config_file, const char* overrides_json, sr_service** out);
SR_API void sr_service_free(sr_service* service);
SR_API sr_status sr_service_start(sr_service* service, int* port);
SR_API sr_status sr_service_stop(sr_service* service);
/* Blocks until the service stops. */
SR_API sr_status sr_service_run(sr_service* service);

/* ---- pipeline operations ---------------------------------------------- */
/* Each takes a JSON options object and returns a JSON result. The option
 * keys are documented in README.md. */

SR_API sr_status sr_generate(const char* options_json, char** out_json);
SR_API sr_status sr_boundary(const char* options_json, char** out_json);
SR_API sr_status sr_audit_sample(const char* options_json, char** out_json);
SR_API sr_status sr_audit_apply(const char* options_json, char** out_json);
SR_API sr_status sr_split(const char* options_json, char** out_json);
SR_API sr_status sr_stats(const char* options_json, char** out_json);
SR_API sr_status sr_train(const char* options_json, char** out_json);
SR_API sr_status sr_tune_thresholds(const char* options_json, char** out_json);
SR_API sr_status sr_eval(const char* options_json, char** out_json);
SR_API sr_status sr_baseline(const char* options_json, char** out_json);
SR_API sr_status sr_compare(const char* options_json, char** out_json);
SR_API sr_status sr_latency(const char* options_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* SKILLROUTE_SKILLROUTE_H_ */
