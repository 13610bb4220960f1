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

#include "api/server.hpp"

#include <httplib.h>

#include "core/errors.hpp"

namespace cpulse {

using nlohmann::json;

StoreRegistry::StoreRegistry(std::filesystem::path root, BotPolicy bots)
    : root_(std::move(root)), bots_(std::move(bots)) {
  std::error_code ec;
  single_file_ = std::filesystem::is_regular_file(root_, ec) || root_.extension() == ".ndjson";
}

std::filesystem::path StoreRegistry::path_for(const RepoRef& repo) const {
  return single_file_ ? root_ : root_ / (repo.file_stem() + ".ndjson");
}

std::shared_ptr<ContributionStore> StoreRegistry::find(const RepoRef& repo, bool create) {
  std::lock_guard lock(mu_);
  if (auto it = open_.find(repo); it != open_.end()) return it->second;

  auto path = path_for(repo);
  std::error_code ec;
  bool exists = std::filesystem::exists(path, ec);
  if (single_file_ && exists) {
    auto owner = ContributionStore::peek_repo(path);
    if (owner && *owner != repo) {
      if (create) {
        throw Error(ErrorCode::InvalidArgument,
                    "this server's store file belongs to " + owner->str());
      }
      return nullptr;
    }
  }
  if (!exists && !create) return nullptr;
  if (single_file_ && !exists && !open_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "this server's store file belongs to " +
                                                open_.begin()->first.str());
  }
  std::shared_ptr<ContributionStore> store = ContributionStore::open(path, repo, bots_);
  open_.emplace(repo, store);
  return store;
}

std::vector<std::shared_ptr<ContributionStore>> StoreRegistry::all() {
  std::vector<RepoRef> repos;
  std::error_code ec;
  if (single_file_) {
    if (auto repo = ContributionStore::peek_repo(root_)) repos.push_back(*repo);
  } else if (std::filesystem::is_directory(root_, ec)) {
    for (const auto& entry : std::filesystem::directory_iterator(root_, ec)) {
      if (entry.path().extension() != ".ndjson") continue;
      if (auto repo = ContributionStore::peek_repo(entry.path())) repos.push_back(*repo);
    }
  }
  {
    std::lock_guard lock(mu_);
    for (const auto& [repo, store] : open_) repos.push_back(repo);
  }
  std::sort(repos.begin(), repos.end());
  repos.erase(std::unique(repos.begin(), repos.end()), repos.end());

  std::vector<std::shared_ptr<ContributionStore>> out;
  for (const auto& repo : repos) {
    if (auto store = find(repo, false)) out.push_back(std::move(store));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Raised inside handlers; becomes {status, code, message}.
struct ApiError {
  int status;
  std::string code;
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const ApiError& err) {
  send_json(res, err.status, json{{"status", err.status}, {"code", err.code}, {"message", err.message}});
}

ApiError from_error(const Error& ex) {
  switch (ex.code()) {
    case ErrorCode::Auth: return {401, "unauthorized", ex.what()};
    case ErrorCode::RateLimited: return {429, "rate_limited", ex.what()};
    case ErrorCode::NotFound: return {404, "not_found", ex.what()};
    case ErrorCode::IllegalTransition: return {409, "illegal_transition", ex.what()};
    case ErrorCode::InvalidSnooze: return {400, "invalid_until", ex.what()};
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidRange: return {400, "invalid_argument", ex.what()};
    case ErrorCode::Parse:
    case ErrorCode::Io:
    case ErrorCode::Internal: break;
  }
  return {500, "internal", ex.what()};
}

template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const ApiError& err) {
      send_error(res, err);
    } catch (const RateLimitedError& ex) {
      res.set_header("Retry-After", std::to_string(ex.retry_after_seconds()));
      send_error(res, from_error(ex));
    } catch (const Error& ex) {
      send_error(res, from_error(ex));
    } catch (const std::exception& ex) {
      send_error(res, {500, "internal", ex.what()});
    }
  };
}

int int_param(const httplib::Request& req, const char* key, int fallback, int lo, int hi,
              const char* code) {
  if (!req.has_param(key)) return fallback;
  const auto text = req.get_param_value(key);
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || value < lo || value > hi) {
    throw ApiError{400, code, std::string(key) + " must be an integer in [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]"};
  }
  return value;
}

bool bool_param(const httplib::Request& req, const char* key, bool fallback) {
  if (!req.has_param(key)) return fallback;
  auto v = req.get_param_value(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ApiError{400, "invalid_argument", std::string(key) + " must be true or false"};
}

RepoRef repo_from(const httplib::Request& req) {
  auto repo = RepoRef::parse(req.matches[1].str() + "/" + req.matches[2].str());
  if (!repo) throw ApiError{400, "invalid_argument", "bad repository path"};
  return *repo;
}

}  // namespace

ApiServer::ApiServer(ServerOptions options)
    : options_(std::move(options)),
      registry_(options_.store, options_.analysis.bots),
      http_(std::make_unique<httplib::Server>()) {
  install_routes();
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::install_routes() {
  auto& http = *http_;
  const std::string project = R"(/api/v1/projects/([^/]+)/([^/]+))";

  // Per-request analysis options; window and threshold come from the query.
  auto analysis_for = [this](const httplib::Request& req) {
    AnalysisOptions opts = options_.analysis;
    opts.window_months = int_param(req, "window", opts.window_months, 1, 120, "invalid_window");
    opts.rising_threshold =
        int_param(req, "threshold", std::min(opts.rising_threshold, opts.window_months), 1,
                  opts.window_months, "invalid_threshold");
    opts.include_members = bool_param(req, "include_members", opts.include_members);
    if (req.has_param("as_of")) {
      opts.as_of = parse_rfc3339(req.get_param_value("as_of"));
      if (!opts.as_of) throw ApiError{400, "invalid_argument", "as_of must be RFC3339"};
    }
    return opts;
  };

  auto snapshot_for = [this](const httplib::Request& req) {
    auto repo = repo_from(req);
    auto store = registry_.find(repo, false);
    if (!store) throw ApiError{404, "not_ingested", repo.str() + " has not been ingested"};
    return store->snapshot();
  };

  http.Get(project + "/trends", guarded([=, this](const httplib::Request& req, httplib::Response& res) {
    auto snap = snapshot_for(req);
    auto opts = analysis_for(req);
    send_json(res, 200, trends_json(analyze(*snap, opts).trends));
  }));

  http.Get(project + "/rising", guarded([=, this](const httplib::Request& req, httplib::Response& res) {
    auto snap = snapshot_for(req);
    auto opts = analysis_for(req);
    send_json(res, 200, rising_json(analyze(*snap, opts).visible_rising(opts.include_members)));
  }));

  http.Get(project + "/labels", guarded([=, this](const httplib::Request& req, httplib::Response& res) {
    auto snap = snapshot_for(req);
    auto issues = snap->issue_list();
    send_json(res, 200, labels_json(label_coverage(issues, options_.analysis.catalog)));
  }));

  http.Get(project + "/goals", guarded([=, this](const httplib::Request& req, httplib::Response& res) {
    auto snap = snapshot_for(req);
    auto opts = analysis_for(req);
    send_json(res, 200, goals_json(analyze(*snap, opts).goals));
  }));

  http.Get(project + "/summary", guarded([=, this](const httplib::Request& req, httplib::Response& res) {
    auto snap = snapshot_for(req);
    auto opts = analysis_for(req);
    send_json(res, 200, analysis_document(*snap, analyze(*snap, opts), opts));
  }));

  http.Get(project + "/recommendations",
           guarded([=, this](const httplib::Request& req, httplib::Response& res) {
             auto snap = snapshot_for(req);
             std::optional<RecommendationState> state;
             if (req.has_param("state")) {
               state = parse_recommendation_state(req.get_param_value("state"));
               if (!state) {
                 throw ApiError{400, "invalid_state",
                                "state must be pending, accepted, dismissed or snoozed"};
               }
             }
             send_json(res, 200, recommendations_json(snap->recommendation_list(), state));
           }));

  http.Post(R"(/api/v1/recommendations/([^/]+)/action)",
            guarded([this](const httplib::Request& req, httplib::Response& res) {
              const std::string id = req.matches[1].str();
              json body;
              try {
                body = json::parse(req.body);
              } catch (const json::exception&) {
                throw ApiError{400, "invalid_body", "body must be a JSON object"};
              }
              if (!body.is_object() || !body.contains("action") || !body["action"].is_string()) {
                throw ApiError{400, "invalid_body", "body must carry an \"action\" string"};
              }
              auto type = parse_action_type(body["action"].get<std::string>());
              if (!type) throw ApiError{400, "invalid_action", "unknown action"};
              Action action{*type, std::nullopt};
              if (body.contains("until") && !body["until"].is_null()) {
                if (!body["until"].is_string()) throw ApiError{400, "invalid_until", "until must be RFC3339"};
                action.until = parse_rfc3339(body["until"].get<std::string>());
                if (!action.until) throw ApiError{400, "invalid_until", "until must be RFC3339"};
              }
              for (const auto& store : registry_.all()) {
                if (!store->snapshot()->recommendations.count(id)) continue;
                send_json(res, 200, to_json(store->apply_action(id, action, options_.clock())));
                return;
              }
              throw ApiError{404, "not_found", "no recommendation with id " + id};
            }));

  http.Post(project + "/ingest", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto repo = repo_from(req);
    json body = json::object();
    if (!req.body.empty()) {
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        throw ApiError{400, "invalid_body", "body must be a JSON object"};
      }
    }
    if (!body.is_object()) throw ApiError{400, "invalid_body", "body must be a JSON object"};
    const std::string source = body.value("source", "fixture");
    auto opts = options_.analysis;
    IngestReport report;
    if (source == "fixture") {
      if (!body.contains("path") || !body["path"].is_string() ||
          body["path"].get<std::string>().empty()) {
        throw ApiError{422, "bad_fixture", "fixture ingest requires a \"path\""};
      }
      std::filesystem::path path = body["path"].get<std::string>();
      std::error_code ec;
      if (!std::filesystem::is_regular_file(path, ec)) {
        throw ApiError{422, "bad_fixture", "fixture not found: " + path.string()};
      }
      auto store = registry_.find(repo, true);
      try {
        report = ingest_fixture(*store, path, opts, false, options_.clock());
      } catch (const ParseError& ex) {
        throw ApiError{422, "bad_fixture", ex.what()};
      } catch (const Error& ex) {
        if (ex.code() == ErrorCode::Io) throw ApiError{422, "bad_fixture", ex.what()};
        throw;
      }
    } else if (source == "api") {
      auto live = options_.api_source();
      auto store = registry_.find(repo, true);
      std::optional<int> lookback;
      if (!options_.full_history) {
        lookback = options_.lookback_months.value_or(default_lookback_months(opts.window_months));
      }
      try {
        report = ingest_source(*store, *live, lookback, opts, options_.clock());
      } catch (const Error& ex) {
        if (ex.code() == ErrorCode::NotFound) {
          throw ApiError{404, "upstream_not_found", ex.what()};
        }
        throw;
      }
    } else {
      throw ApiError{400, "invalid_body", "source must be \"api\" or \"fixture\""};
    }
    send_json(res, 200, report.to_json());
  }));

  if (options_.static_dir) {
    if (!http.set_mount_point("/", options_.static_dir->string())) {
      throw Error(ErrorCode::Io, "cannot serve static files from " + options_.static_dir->string());
    }
  }

  http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty() && req.path.rfind("/api/", 0) == 0) {
      send_error(res, {res.status, res.status == 404 ? "no_route" : "http_error",
                       "no handler for " + req.method + " " + req.path});
    }
  });
}

int ApiServer::bind() {
  int port = options_.port == 0 ? http_->bind_to_any_port(options_.bind)
                                : (http_->bind_to_port(options_.bind, options_.port) ? options_.port : -1);
  if (port < 0) {
    throw Error(ErrorCode::Io,
                "cannot bind " + options_.bind + ":" + std::to_string(options_.port));
  }
  return port;
}

void ApiServer::run() { http_->listen_after_bind(); }

void ApiServer::stop() {
  if (http_) http_->stop();
}

}  // namespace cpulse
