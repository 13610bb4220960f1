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

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "core/time.hpp"

namespace cpulse {

struct RepoRef {
  std::string owner;
  std::string name;

  /// Parses "owner/name"; both parts nonempty and free of whitespace.
  static std::optional<RepoRef> parse(std::string_view text);

  std::string str() const { return owner + "/" + name; }
  /// "owner__name", used for per-repository store files.
  std::string file_stem() const { return owner + "__" + name; }

  auto operator<=>(const RepoRef&) const = default;
};

struct ActorId {
  std::string login;
  bool is_bot = false;

  auto operator<=>(const ActorId&) const = default;
};

enum class EventKind { Commit, IssueOpened, PullRequestOpened };

const char* to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text);

struct ContributionEvent {
  std::string event_id;
  ActorId actor;
  EventKind kind = EventKind::Commit;
  Instant timestamp{};
  RepoRef repo;

  bool operator==(const ContributionEvent&) const = default;
};

/// Ordering used for every event listing: (timestamp, event_id).
bool event_order(const ContributionEvent& a, const ContributionEvent& b);

enum class IssueState { Open, Closed };

const char* to_string(IssueState state) noexcept;
std::optional<IssueState> parse_issue_state(std::string_view text);

struct IssueRecord {
  std::string issue_id;
  IssueState state = IssueState::Open;
  std::vector<std::string> labels;  // normalized, unique, first-seen order
  Instant created_at{};

  bool operator==(const IssueRecord&) const = default;
};

/// Repository metadata feeding goal detection.
struct ProjectInfo {
  std::string description;
  std::vector<std::string> topics;
  std::string readme;

  bool operator==(const ProjectInfo&) const = default;
};

std::string normalize_login(std::string_view login);

/// Lowercase, trim, and collapse runs of whitespace, '_' and '-' into one '-'.
std::string normalize_label(std::string_view label);

/// Normalizes each label and drops repeats, keeping first-seen order.
std::vector<std::string> normalize_labels(const std::vector<std::string>& raw);

/// Key for commits that carry no platform login.
std::string email_identity(std::string_view email);

class BotPolicy {
 public:
  BotPolicy();  // default denylist of well-known automation accounts
  explicit BotPolicy(std::set<std::string> denylist);

  bool is_bot(std::string_view normalized_login) const;
  ActorId actor(std::string_view raw_login) const;

  const std::set<std::string>& denylist() const { return denylist_; }

 private:
  std::set<std::string> denylist_;
};

}  // namespace cpulse
