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

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ingest/source.hpp"
#include "report/report.hpp"
#include "store/store.hpp"

namespace httplib {
class Server;
}

namespace cpulse {

struct ServerOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;  // 0 picks an ephemeral port
  /// A store directory (files named owner__name.ndjson) or one store file.
  std::filesystem::path store = ".community-pulse";
  AnalysisOptions analysis;
  /// Static dashboard assets served under "/".
  std::optional<std::filesystem::path> static_dir;
  std::function<Instant()> clock = now_utc;
  /// Builds the live source for POST .../ingest {"source":"api"}.
  std::function<std::unique_ptr<EventSource>()> api_source = [] {
    return std::make_unique<GitHubSource>(github_config_from_env());
  };
  std::optional<int> lookback_months;  // live ingest depth; nullopt = default
  bool full_history = false;
};

/// Resolves repositories to stores. Stores are opened lazily and cached.
class StoreRegistry {
 public:
  explicit StoreRegistry(std::filesystem::path root, BotPolicy bots = {});

  /// nullptr when the repository has never been ingested and `create` is
  /// false.
  std::shared_ptr<ContributionStore> find(const RepoRef& repo, bool create);

  /// Every store currently on disk or cached, for id lookups.
  std::vector<std::shared_ptr<ContributionStore>> all();

 private:
  std::filesystem::path path_for(const RepoRef& repo) const;

  std::filesystem::path root_;
  bool single_file_;
  BotPolicy bots_;
  std::mutex mu_;
  std::map<RepoRef, std::shared_ptr<ContributionStore>> open_;
};

/// JSON-over-HTTP service under /api/v1.
class ApiServer {
 public:
  explicit ApiServer(ServerOptions options);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds the listening socket and returns the port. Throws Error(Io).
  int bind();
  /// Serves until stop(); bind() must have succeeded.
  void run();
  void stop();

 private:
  void install_routes();

  ServerOptions options_;
  StoreRegistry registry_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace cpulse
