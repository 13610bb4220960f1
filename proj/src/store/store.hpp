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
#include <vector>

#include "ingest/fixture.hpp"
#include "ingest/model.hpp"
#include "recommend/recommendation.hpp"

namespace cpulse {

struct StoreSnapshot {
  RepoRef repo;
  std::map<std::string, ContributionEvent> events;
  std::map<std::string, IssueRecord> issues;
  std::map<std::string, Recommendation> recommendations;
  std::optional<ProjectInfo> project;
  /// Max ingestion watermark; unset until something is ingested.
  std::optional<Instant> as_of;
  /// Earliest instant the ingested history covers; unset = full history.
  std::optional<Instant> history_start;

  /// Events ordered by (timestamp, event_id).
  std::vector<ContributionEvent> sorted_events() const;
  std::vector<IssueRecord> issue_list() const;
  std::vector<Recommendation> recommendation_list() const;
};

/// Per-repository store persisted as one compacted NDJSON file: a meta
/// line, then project, event, issue and recommendation records.
///
/// Writers are serialized; each commit rewrites the file atomically and
/// then swaps the in-memory snapshot. Readers hold whatever snapshot was
/// current when they asked and never block on writers.
class ContributionStore {
 public:
  /// In-memory store with no backing file.
  explicit ContributionStore(RepoRef repo);

  /// Loads `path` if it exists. `repo` is required for a new file and must
  /// match an existing one. Throws ParseError/Error(Io|InvalidArgument).
  static std::unique_ptr<ContributionStore> open(const std::filesystem::path& path,
                                                 std::optional<RepoRef> repo,
                                                 const BotPolicy& bots = {});

  /// Default location: ./.community-pulse/owner__name.ndjson
  static std::filesystem::path default_path(const RepoRef& repo);

  /// Reads only the repository named in a store file's meta line.
  static std::optional<RepoRef> peek_repo(const std::filesystem::path& path);

  const RepoRef& repo() const { return repo_; }
  const std::filesystem::path& path() const { return path_; }

  std::shared_ptr<const StoreSnapshot> snapshot() const;

  /// Returns how many event_ids were not present before. Repeats overwrite.
  std::size_t upsert_events(const std::vector<ContributionEvent>& events);
  std::size_t upsert_issues(const std::vector<IssueRecord>& issues);

  /// Inclusive [from, to], sorted by (timestamp, event_id). Throws
  /// Error(InvalidRange) when from > to.
  std::vector<ContributionEvent> query_window(Instant from, Instant to) const;

  /// Applies an action under the writer lock. Throws Error(NotFound) for an
  /// unknown id plus whatever apply_transition throws.
  Recommendation apply_action(const std::string& id, const Action& action, Instant now);

  std::size_t wake_expired(Instant now);

  /// Runs `mutate` on a copy of the current snapshot, persists it, and
  /// publishes it. Nothing changes if `mutate` or persistence throws.
  void commit(const std::function<void(StoreSnapshot&)>& mutate);

  /// Canonical file body for a snapshot.
  static std::string serialize(const StoreSnapshot& snapshot);

 private:
  void persist(const StoreSnapshot& snapshot) const;

  RepoRef repo_;
  std::filesystem::path path_;
  std::mutex write_mu_;
  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const StoreSnapshot> current_;
};

}  // namespace cpulse
