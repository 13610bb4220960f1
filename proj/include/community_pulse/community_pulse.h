// Copyright 2026 The Community Pulse Authors
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

/*
 * C interface to the community-pulse core.
 *
 * All functions return a cp_status. On failure a thread-local message is
 * available from cp_last_error(). Strings handed out through `char**`
 * out-parameters are owned by the caller and released with cp_string_free().
 * Instants are Unix seconds (UTC); 0 means "not set" where noted.
 */
#ifndef COMMUNITY_PULSE_H
#define COMMUNITY_PULSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CP_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define CP_API __attribute__((visibility("default")))
#else
#  define CP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cp_status {
  CP_OK = 0,
  CP_ERR_INVALID_ARGUMENT = 1,
  CP_ERR_IO = 2,
  CP_ERR_PARSE = 3,
  CP_ERR_AUTH = 4,
  CP_ERR_RATE_LIMITED = 5,
  CP_ERR_NOT_FOUND = 6,
  CP_ERR_ILLEGAL_TRANSITION = 7,
  CP_ERR_INVALID_SNOOZE = 8,
  CP_ERR_INVALID_RANGE = 9,
  CP_ERR_INTERNAL = 10,
  /* Ingestion finished but some input was skipped; see the report. */
  CP_PARTIAL = 11
} cp_status;

typedef enum cp_format {
  CP_FORMAT_JSON = 0,
  CP_FORMAT_CSV = 1,
  CP_FORMAT_TEXT = 2
} cp_format;

typedef enum cp_action {
  CP_ACTION_ACCEPT = 0,
  CP_ACTION_DISMISS = 1,
  CP_ACTION_SNOOZE = 2,
  CP_ACTION_WAKE = 3
} cp_action;

/* Opaque per-repository store handle. */
typedef struct cp_store cp_store;

/* Analysis settings. Initialize with cp_options_init() before use; string
 * fields may be NULL to use the built-in defaults. */
typedef struct cp_options {
  int window_months;          /* default 6 */
  int rising_threshold;       /* default 3 */
  int64_t as_of;              /* 0 = store watermark */
  int include_members;        /* rising list keeps team members when nonzero */
  int exclude_members_from_badges; /* default 1 */
  double coverage_threshold_percent; /* default 10 */
  const char* membership_path;
  const char* catalog_path;
  const char* taxonomy_path;
} cp_options;

typedef struct cp_server_options {
  const char* bind;           /* default "127.0.0.1" */
  int port;                   /* default 8080; 0 = ephemeral */
  const char* store_path;     /* store directory or single store file */
  const char* static_dir;     /* dashboard assets, may be NULL */
  int lookback_months;        /* 0 = window + 24 */
  int full_history;
  /* Called once the socket is bound, with the actual port. May be NULL. */
  void (*on_ready)(int port, void* context);
  void* context;
} cp_server_options;

CP_API const char* cp_version(void);
CP_API const char* cp_last_error(void);
CP_API const char* cp_status_name(cp_status status);
CP_API void cp_string_free(char* text);

/* Parses an RFC3339 timestamp into Unix seconds. */
CP_API cp_status cp_parse_time(const char* rfc3339, int64_t* out);

CP_API void cp_options_init(cp_options* options);
CP_API void cp_server_options_init(cp_server_options* options);

/* Opens (or prepares to create) a store. `repo` ("owner/name") may be NULL
 * only when the file exists. `path` NULL selects the default location. */
CP_API cp_status cp_store_open(const char* path, const char* repo, cp_store** out);
CP_API void cp_store_close(cp_store* store);
/* Repository ("owner/name") of the store; valid until cp_store_close. */
CP_API const char* cp_store_repo(const cp_store* store);

/* Reads the first repository named by event lines in a fixture. */
CP_API cp_status cp_fixture_repo(const char* fixture_path, char** repo_out);

/* Loads a fixture, regenerates recommendations, and persists. With
 * `lenient` nonzero malformed lines are skipped and CP_PARTIAL returned.
 * `report_json` receives the ingestion report. `now` 0 = system clock. */
CP_API cp_status cp_ingest_fixture(cp_store* store, const char* fixture_path,
                                   const cp_options* options, int lenient, int64_t now,
                                   char** report_json);

/* Live ingestion from the GitHub-compatible API named by
 * COMMUNITY_PULSE_API_URL (default api.github.com) using
 * COMMUNITY_PULSE_TOKEN. `lookback_months` 0 = window + 24, negative = full
 * history. */
CP_API cp_status cp_ingest_api(cp_store* store, const cp_options* options, int lookback_months,
                               int64_t now, char** report_json);

/* Full analysis report in the requested format. */
CP_API cp_status cp_analyze(const cp_store* store, const cp_options* options, cp_format format,
                            char** out);

/* Writes month,joined,active,retained CSV to `out_path`. */
CP_API cp_status cp_export_trends(const cp_store* store, const cp_options* options,
                                  const char* out_path);

/* Recommendations as a JSON array; `state` NULL for all states. */
CP_API cp_status cp_list_recommendations(const cp_store* store, const char* state, char** out);

/* `until` 0 = default snooze (30 days). Returns the updated record. */
CP_API cp_status cp_apply_action(cp_store* store, const char* id, cp_action action,
                                 int64_t until, int64_t now, char** recommendation_json);

CP_API cp_status cp_wake_expired(cp_store* store, int64_t now, size_t* woken);

/* Normalizes, deduplicates and sorts labels from a file or http(s) URL and
 * writes a catalog file. `out_path` is left untouched on failure. */
CP_API cp_status cp_refresh_catalog(const char* source, const char* out_path, size_t* count);

/* Serves the HTTP API; blocks until SIGINT/SIGTERM. */
CP_API cp_status cp_serve(const cp_server_options* server, const cp_options* options);

#ifdef __cplusplus
}
#endif

#endif /* COMMUNITY_PULSE_H */
