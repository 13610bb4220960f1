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

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ingest/fixture.hpp"
#include "ingest/model.hpp"

namespace cpulse {

/// Where contribution data comes from. `lookback_months` of nullopt means
/// full history.
class EventSource {
 public:
  virtual ~EventSource() = default;

  /// Events with as_of - lookback <= timestamp <= as_of, deduplicated by
  /// event_id and sorted by (timestamp, event_id). Bots are flagged.
  virtual std::vector<ContributionEvent> fetch_events(
      const RepoRef& repo, Instant as_of, std::optional<int> lookback_months) = 0;

  /// Every issue regardless of state, labels normalized.
  virtual std::vector<IssueRecord> fetch_issues(const RepoRef& repo) = 0;

  virtual std::optional<ProjectInfo> fetch_project(const RepoRef& repo) = 0;
};

/// Lower bound of a lookback range, or nullopt for full history.
std::optional<Instant> lookback_start(Instant as_of, std::optional<int> lookback_months);

/// Sort by (timestamp, event_id) and drop later repeats of an event_id.
void sort_and_dedup(std::vector<ContributionEvent>& events);

class FixtureSource : public EventSource {
 public:
  explicit FixtureSource(FixtureContents contents);
  static FixtureSource from_file(const std::filesystem::path& path,
                                 const BotPolicy& bots = {});

  std::vector<ContributionEvent> fetch_events(
      const RepoRef& repo, Instant as_of, std::optional<int> lookback_months) override;
  std::vector<IssueRecord> fetch_issues(const RepoRef& repo) override;
  std::optional<ProjectInfo> fetch_project(const RepoRef& repo) override;

 private:
  FixtureContents contents_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{60000};
};

struct GitHubConfig {
  std::string base_url = "https://api.github.com";
  std::string token;  // empty raises AuthError on first request
  int page_size = 100;
  RetryPolicy retry;
  std::chrono::seconds timeout{30};
};

/// Reads COMMUNITY_PULSE_TOKEN, plus COMMUNITY_PULSE_API_URL when set.
GitHubConfig github_config_from_env();

/// REST client for a GitHub-compatible API. Follows Link-header
/// pagination; commits, issues and pulls are fetched concurrently.
class GitHubSource : public EventSource {
 public:
  GitHubSource(GitHubConfig config, BotPolicy bots = {});

  std::vector<ContributionEvent> fetch_events(
      const RepoRef& repo, Instant as_of, std::optional<int> lookback_months) override;
  std::vector<IssueRecord> fetch_issues(const RepoRef& repo) override;
  std::optional<ProjectInfo> fetch_project(const RepoRef& repo) override;

 private:
  GitHubConfig config_;
  BotPolicy bots_;
};

/// Extracts the rel="next" target from an RFC 8288 Link header.
std::optional<std::string> next_link(const std::string& link_header);

}  // namespace cpulse
