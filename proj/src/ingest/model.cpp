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

#include "ingest/model.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

namespace cpulse {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<RepoRef> RepoRef::parse(std::string_view text) {
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == text.size()) {
    return std::nullopt;
  }
  RepoRef ref{std::string(text.substr(0, slash)), std::string(text.substr(slash + 1))};
  auto bad = [](const std::string& part) {
    return std::any_of(part.begin(), part.end(),
                       [](char c) { return is_space(c) || c == '/'; });
  };
  if (bad(ref.owner) || bad(ref.name)) return std::nullopt;
  return ref;
}

const char* to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Commit: return "commit";
    case EventKind::IssueOpened: return "issue_opened";
    case EventKind::PullRequestOpened: return "pr_opened";
  }
  return "commit";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "commit") return EventKind::Commit;
  if (text == "issue_opened") return EventKind::IssueOpened;
  if (text == "pr_opened") return EventKind::PullRequestOpened;
  return std::nullopt;
}

bool event_order(const ContributionEvent& a, const ContributionEvent& b) {
  return std::tie(a.timestamp, a.event_id) < std::tie(b.timestamp, b.event_id);
}

const char* to_string(IssueState state) noexcept {
  return state == IssueState::Open ? "open" : "closed";
}

std::optional<IssueState> parse_issue_state(std::string_view text) {
  if (text == "open") return IssueState::Open;
  if (text == "closed") return IssueState::Closed;
  return std::nullopt;
}

std::string normalize_login(std::string_view login) {
  login = trim(login);
  std::string out(login);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

std::string normalize_label(std::string_view label) {
  std::string out;
  out.reserve(label.size());
  bool pending_sep = false;
  for (char c : label) {
    if (is_space(c) || c == '_' || c == '-') {
      pending_sep = true;
      continue;
    }
    if (pending_sep && !out.empty()) out.push_back('-');
    pending_sep = false;
    out.push_back(lower(c));
  }
  return out;
}

std::vector<std::string> normalize_labels(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& label : raw) {
    auto norm = normalize_label(label);
    if (norm.empty()) continue;
    if (std::find(out.begin(), out.end(), norm) == out.end()) out.push_back(std::move(norm));
  }
  return out;
}

std::string email_identity(std::string_view email) {
  auto local = email.substr(0, email.find('@'));
  return "email:" + normalize_login(local);
}

BotPolicy::BotPolicy()
    : denylist_{"dependabot", "dependabot-preview", "renovate", "renovate-bot",
                "github-actions", "greenkeeper", "codecov", "coveralls",
                "snyk-bot", "pre-commit-ci", "allcontributors", "imgbot",
                "mergify", "stale", "web-flow"} {}

BotPolicy::BotPolicy(std::set<std::string> denylist) {
  for (const auto& login : denylist) denylist_.insert(normalize_login(login));
}

bool BotPolicy::is_bot(std::string_view login) const {
  constexpr std::string_view suffix = "[bot]";
  if (login.size() >= suffix.size() &&
      login.substr(login.size() - suffix.size()) == suffix) {
    return true;
  }
  return denylist_.count(std::string(login)) > 0;
}

ActorId BotPolicy::actor(std::string_view raw_login) const {
  ActorId id{normalize_login(raw_login), false};
  id.is_bot = is_bot(id.login);
  return id;
}

}  // namespace cpulse
