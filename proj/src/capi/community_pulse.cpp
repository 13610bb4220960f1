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

#include "community_pulse/community_pulse.h"

#include <atomic>
#include <csignal>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <httplib.h>

#include "api/server.hpp"
#include "core/errors.hpp"
#include "report/report.hpp"
#include "store/store.hpp"

struct cp_store {
  std::unique_ptr<cpulse::ContributionStore> impl;
  std::string repo;
};

namespace {

using namespace cpulse;
using nlohmann::json;

thread_local std::string g_last_error;

cp_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return CP_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return CP_ERR_IO;
    case ErrorCode::Parse: return CP_ERR_PARSE;
    case ErrorCode::Auth: return CP_ERR_AUTH;
    case ErrorCode::RateLimited: return CP_ERR_RATE_LIMITED;
    case ErrorCode::NotFound: return CP_ERR_NOT_FOUND;
    case ErrorCode::IllegalTransition: return CP_ERR_ILLEGAL_TRANSITION;
    case ErrorCode::InvalidSnooze: return CP_ERR_INVALID_SNOOZE;
    case ErrorCode::InvalidRange: return CP_ERR_INVALID_RANGE;
    case ErrorCode::Internal: return CP_ERR_INTERNAL;
  }
  return CP_ERR_INTERNAL;
}

cp_status fail(cp_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

/// Runs `body`, translating exceptions into status codes.
template <typename Body>
cp_status guarded(Body&& body) noexcept {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& ex) {
    return fail(status_of(ex.code()), ex.what());
  } catch (const std::bad_alloc&) {
    return fail(CP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& ex) {
    return fail(CP_ERR_INTERNAL, ex.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Instant from_unix(int64_t seconds) { return Instant{std::chrono::seconds{seconds}}; }

Instant now_or(int64_t now) { return now == 0 ? now_utc() : from_unix(now); }

AnalysisOptions to_analysis(const cp_options* in) {
  cp_options defaults;
  cp_options_init(&defaults);
  const cp_options& o = in ? *in : defaults;
  AnalysisOptions out;
  out.window_months = o.window_months;
  out.rising_threshold = o.rising_threshold;
  if (o.window_months < 1) throw Error(ErrorCode::InvalidArgument, "window must be at least 1");
  if (o.rising_threshold < 1 || o.rising_threshold > o.window_months) {
    throw Error(ErrorCode::InvalidArgument, "threshold must be between 1 and the window length");
  }
  if (o.as_of != 0) out.as_of = from_unix(o.as_of);
  out.include_members = o.include_members != 0;
  out.generate.exclude_members = o.exclude_members_from_badges != 0;
  out.generate.coverage_threshold_percent = o.coverage_threshold_percent;
  if (o.membership_path && *o.membership_path) out.membership = load_membership(o.membership_path);
  if (o.catalog_path && *o.catalog_path) out.catalog = LabelCatalog::load(o.catalog_path);
  if (o.taxonomy_path && *o.taxonomy_path) out.taxonomy = load_taxonomy(o.taxonomy_path);
  return out;
}

cp_status require(bool ok, const char* what) {
  return ok ? CP_OK : fail(CP_ERR_INVALID_ARGUMENT, what);
}

std::string fetch_source(const std::string& source) {
  if (source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0) {
    auto scheme_end = source.find("://") + 3;
    auto slash = source.find('/', scheme_end);
    std::string host = source.substr(0, slash);
    std::string target = slash == std::string::npos ? "/" : source.substr(slash);
    httplib::Client client(host);
    client.set_follow_location(true);
    auto res = client.Get(target);
    if (!res) throw Error(ErrorCode::Io, "fetch failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw Error(ErrorCode::Io, "fetch failed with HTTP " + std::to_string(res->status));
    }
    return res->body;
  }
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + source);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::atomic<ApiServer*> g_serving{nullptr};

extern "C" void stop_serving(int) {
  if (auto* server = g_serving.load()) server->stop();
}

}  // namespace

extern "C" {

const char* cp_version(void) { return "0.1.0"; }

const char* cp_last_error(void) { return g_last_error.c_str(); }

const char* cp_status_name(cp_status status) {
  switch (status) {
    case CP_OK: return "ok";
    case CP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case CP_ERR_IO: return "io_error";
    case CP_ERR_PARSE: return "parse_error";
    case CP_ERR_AUTH: return "auth_error";
    case CP_ERR_RATE_LIMITED: return "rate_limited";
    case CP_ERR_NOT_FOUND: return "not_found";
    case CP_ERR_ILLEGAL_TRANSITION: return "illegal_transition";
    case CP_ERR_INVALID_SNOOZE: return "invalid_snooze";
    case CP_ERR_INVALID_RANGE: return "invalid_range";
    case CP_ERR_INTERNAL: return "internal";
    case CP_PARTIAL: return "partial";
  }
  return "unknown";
}

void cp_string_free(char* text) { std::free(text); }

cp_status cp_parse_time(const char* text, int64_t* out) {
  return guarded([&] {
    if (auto st = require(text && out, "null argument"); st != CP_OK) return st;
    auto t = parse_rfc3339(text);
    if (!t) return fail(CP_ERR_INVALID_ARGUMENT, std::string("not an RFC3339 timestamp: ") + text);
    *out = t->time_since_epoch().count();
    return CP_OK;
  });
}

void cp_options_init(cp_options* o) {
  if (!o) return;
  *o = cp_options{};
  o->window_months = 6;
  o->rising_threshold = 3;
  o->exclude_members_from_badges = 1;
  o->coverage_threshold_percent = 10.0;
}

void cp_server_options_init(cp_server_options* o) {
  if (!o) return;
  *o = cp_server_options{};
  o->bind = "127.0.0.1";
  o->port = 8080;
}

cp_status cp_store_open(const char* path, const char* repo, cp_store** out) {
  return guarded([&] {
    if (auto st = require(out != nullptr, "out handle is null"); st != CP_OK) return st;
    *out = nullptr;
    std::optional<RepoRef> ref;
    if (repo && *repo) {
      ref = RepoRef::parse(repo);
      if (!ref) return fail(CP_ERR_INVALID_ARGUMENT, std::string("repository must be owner/name: ") + repo);
    }
    std::filesystem::path file;
    if (path && *path) {
      file = path;
    } else if (ref) {
      file = ContributionStore::default_path(*ref);
    } else {
      return fail(CP_ERR_INVALID_ARGUMENT, "need a store path or a repository");
    }
    auto handle = std::make_unique<cp_store>();
    handle->impl = ContributionStore::open(file, ref);
    handle->repo = handle->impl->repo().str();
    *out = handle.release();
    return CP_OK;
  });
}

void cp_store_close(cp_store* store) { delete store; }

const char* cp_store_repo(const cp_store* store) { return store ? store->repo.c_str() : ""; }

cp_status cp_fixture_repo(const char* fixture_path, char** repo_out) {
  return guarded([&] {
    if (auto st = require(fixture_path && repo_out, "null argument"); st != CP_OK) return st;
    std::vector<LineDiagnostic> ignored;
    auto contents = load_fixture_lenient(fixture_path, BotPolicy{}, ignored);
    if (contents.events.empty()) {
      return fail(CP_ERR_INVALID_ARGUMENT, "fixture has no events naming a repository");
    }
    *repo_out = dup_string(contents.events.front().repo.str());
    return CP_OK;
  });
}

cp_status cp_ingest_fixture(cp_store* store, const char* fixture_path, const cp_options* options,
                            int lenient, int64_t now, char** report_json) {
  return guarded([&] {
    if (auto st = require(store && fixture_path, "null argument"); st != CP_OK) return st;
    auto opts = to_analysis(options);
    auto report = ingest_fixture(*store->impl, fixture_path, opts, lenient != 0, now_or(now));
    if (report_json) *report_json = dup_string(report.to_json().dump());
    if (report.partial()) {
      g_last_error = std::to_string(report.diagnostics.size()) + " malformed line(s) skipped";
      return CP_PARTIAL;
    }
    return CP_OK;
  });
}

cp_status cp_ingest_api(cp_store* store, const cp_options* options, int lookback_months,
                        int64_t now, char** report_json) {
  return guarded([&] {
    if (auto st = require(store != nullptr, "null store"); st != CP_OK) return st;
    auto opts = to_analysis(options);
    std::optional<int> lookback;
    if (lookback_months == 0) {
      lookback = default_lookback_months(opts.window_months);
    } else if (lookback_months > 0) {
      if (lookback_months < opts.window_months) {
        return fail(CP_ERR_INVALID_ARGUMENT, "lookback must cover at least the window");
      }
      lookback = lookback_months;
    }
    GitHubSource source(github_config_from_env(), opts.bots);
    auto report = ingest_source(*store->impl, source, lookback, opts, now_or(now));
    if (report_json) *report_json = dup_string(report.to_json().dump());
    if (report.partial()) {
      g_last_error = report.diagnostics.front().reason;
      return CP_PARTIAL;
    }
    return CP_OK;
  });
}

cp_status cp_analyze(const cp_store* store, const cp_options* options, cp_format format,
                     char** out) {
  return guarded([&] {
    if (auto st = require(store && out, "null argument"); st != CP_OK) return st;
    auto opts = to_analysis(options);
    auto snap = store->impl->snapshot();
    auto doc = analysis_document(*snap, analyze(*snap, opts), opts);
    switch (format) {
      case CP_FORMAT_JSON: *out = dup_string(doc.dump(2) + "\n"); break;
      case CP_FORMAT_CSV: *out = dup_string(render_csv(doc)); break;
      case CP_FORMAT_TEXT: *out = dup_string(render_text(doc)); break;
      default: return fail(CP_ERR_INVALID_ARGUMENT, "unknown format");
    }
    return CP_OK;
  });
}

cp_status cp_export_trends(const cp_store* store, const cp_options* options, const char* out_path) {
  return guarded([&] {
    if (auto st = require(store && out_path, "null argument"); st != CP_OK) return st;
    auto opts = to_analysis(options);
    auto snap = store->impl->snapshot();
    auto csv = trends_csv(analyze(*snap, opts).trends);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) return fail(CP_ERR_IO, std::string("cannot write ") + out_path);
    out << csv;
    out.flush();
    if (!out) return fail(CP_ERR_IO, std::string("write failed for ") + out_path);
    return CP_OK;
  });
}

cp_status cp_list_recommendations(const cp_store* store, const char* state, char** out) {
  return guarded([&] {
    if (auto st = require(store && out, "null argument"); st != CP_OK) return st;
    std::optional<RecommendationState> filter;
    if (state && *state) {
      filter = parse_recommendation_state(state);
      if (!filter) return fail(CP_ERR_INVALID_ARGUMENT, std::string("unknown state ") + state);
    }
    *out = dup_string(recommendations_json(store->impl->snapshot()->recommendation_list(), filter).dump());
    return CP_OK;
  });
}

cp_status cp_apply_action(cp_store* store, const char* id, cp_action action, int64_t until,
                          int64_t now, char** recommendation_json) {
  return guarded([&] {
    if (auto st = require(store && id, "null argument"); st != CP_OK) return st;
    Action act;
    switch (action) {
      case CP_ACTION_ACCEPT: act.type = ActionType::Accept; break;
      case CP_ACTION_DISMISS: act.type = ActionType::Dismiss; break;
      case CP_ACTION_SNOOZE: act.type = ActionType::Snooze; break;
      case CP_ACTION_WAKE: act.type = ActionType::Wake; break;
      default: return fail(CP_ERR_INVALID_ARGUMENT, "unknown action");
    }
    if (until != 0) act.until = from_unix(until);
    auto rec = store->impl->apply_action(id, act, now_or(now));
    if (recommendation_json) *recommendation_json = dup_string(to_json(rec).dump());
    return CP_OK;
  });
}

cp_status cp_wake_expired(cp_store* store, int64_t now, size_t* woken) {
  return guarded([&] {
    if (auto st = require(store != nullptr, "null store"); st != CP_OK) return st;
    auto n = store->impl->wake_expired(now_or(now));
    if (woken) *woken = n;
    return CP_OK;
  });
}

cp_status cp_refresh_catalog(const char* source, const char* out_path, size_t* count) {
  return guarded([&] {
    if (auto st = require(source && out_path, "null argument"); st != CP_OK) return st;
    auto labels = extract_catalog_labels(fetch_source(source));
    auto body = render_catalog(labels);
    LabelCatalog::parse(body);  // enforces the required entries before touching out_path
    std::filesystem::path out(out_path);
    auto tmp = out;
    tmp += ".tmp";
    {
      std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
      if (!file) return fail(CP_ERR_IO, "cannot write " + tmp.string());
      file << body;
      file.flush();
      if (!file) return fail(CP_ERR_IO, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, out, ec);
    if (ec) return fail(CP_ERR_IO, "cannot replace " + out.string() + ": " + ec.message());
    if (count) *count = labels.size();
    return CP_OK;
  });
}

cp_status cp_serve(const cp_server_options* server, const cp_options* options) {
  return guarded([&] {
    cp_server_options defaults;
    cp_server_options_init(&defaults);
    const cp_server_options& s = server ? *server : defaults;
    ServerOptions opts;
    opts.bind = s.bind && *s.bind ? s.bind : "127.0.0.1";
    opts.port = s.port;
    if (s.store_path && *s.store_path) opts.store = s.store_path;
    if (s.static_dir && *s.static_dir) opts.static_dir = std::filesystem::path(s.static_dir);
    if (s.lookback_months > 0) opts.lookback_months = s.lookback_months;
    opts.full_history = s.full_history != 0;
    opts.analysis = to_analysis(options);

    ApiServer api(std::move(opts));
    int port = api.bind();
    g_serving.store(&api);
    auto prev_int = std::signal(SIGINT, stop_serving);
    auto prev_term = std::signal(SIGTERM, stop_serving);
    if (s.on_ready) s.on_ready(port, s.context);
    api.run();
    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);
    g_serving.store(nullptr);
    return CP_OK;
  });
}

}  // extern "C"
