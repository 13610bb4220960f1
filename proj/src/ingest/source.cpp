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

#include "ingest/source.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <set>
#include <thread>
#include <unordered_set>

#include <httplib.h>

#include "core/errors.hpp"

namespace cpulse {

using nlohmann::json;

std::optional<Instant> lookback_start(Instant as_of, std::optional<int> lookback_months) {
  if (!lookback_months) return std::nullopt;
  return add_months(as_of, -*lookback_months);
}

void sort_and_dedup(std::vector<ContributionEvent>& events) {
  std::stable_sort(events.begin(), events.end(), event_order);
  std::unordered_set<std::string> seen;
  std::vector<ContributionEvent> out;
  out.reserve(events.size());
  for (auto& e : events) {
    if (seen.insert(e.event_id).second) out.push_back(std::move(e));
  }
  events = std::move(out);
}

// ---------------------------------------------------------------------------

FixtureSource::FixtureSource(FixtureContents contents) : contents_(std::move(contents)) {}

FixtureSource FixtureSource::from_file(const std::filesystem::path& path,
                                       const BotPolicy& bots) {
  return FixtureSource(load_fixture(path, bots));
}

std::vector<ContributionEvent> FixtureSource::fetch_events(
    const RepoRef& repo, Instant as_of, std::optional<int> lookback_months) {
  auto from = lookback_start(as_of, lookback_months);
  std::vector<ContributionEvent> out;
  for (const auto& e : contents_.events) {
    if (e.repo != repo || e.timestamp > as_of) continue;
    if (from && e.timestamp < *from) continue;
    out.push_back(e);
  }
  sort_and_dedup(out);
  return out;
}

std::vector<IssueRecord> FixtureSource::fetch_issues(const RepoRef&) {
  return contents_.issues;
}

std::optional<ProjectInfo> FixtureSource::fetch_project(const RepoRef&) {
  return contents_.project;
}

// ---------------------------------------------------------------------------

GitHubConfig github_config_from_env() {
  GitHubConfig config;
  if (const char* token = std::getenv("COMMUNITY_PULSE_TOKEN")) config.token = token;
  if (const char* url = std::getenv("COMMUNITY_PULSE_API_URL"); url && *url) {
    config.base_url = url;
  }
  return config;
}

std::optional<std::string> next_link(const std::string& header) {
  std::size_t pos = 0;
  while (pos < header.size()) {
    auto open = header.find('<', pos);
    if (open == std::string::npos) break;
    auto close = header.find('>', open);
    if (close == std::string::npos) break;
    auto end = header.find(',', close);
    auto params = header.substr(close + 1, end == std::string::npos ? std::string::npos
                                                                     : end - close - 1);
    if (params.find("rel=\"next\"") != std::string::npos ||
        params.find("rel=next") != std::string::npos) {
      return header.substr(open + 1, close - open - 1);
    }
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return std::nullopt;
}

namespace {

struct Page {
  json body;
  std::string raw;
  std::optional<std::string> next;
};

/// Path-and-query portion of an absolute or relative URL.
std::string request_target(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos) return url;
  auto slash = url.find('/', scheme + 3);
  return slash == std::string::npos ? "/" : url.substr(slash);
}

/// Path prefix of the configured base URL, e.g. "/api/v3" for enterprise.
std::string base_path(const std::string& base_url) {
  auto target = request_target(base_url);
  if (base_url.find("://") == std::string::npos || target == "/") return "";
  while (!target.empty() && target.back() == '/') target.pop_back();
  return target;
}

std::string host_part(const std::string& base_url) {
  auto scheme = base_url.find("://");
  if (scheme == std::string::npos) return base_url;
  auto slash = base_url.find('/', scheme + 3);
  return base_url.substr(0, slash);
}

long header_long(const httplib::Response& res, const char* key, long fallback) {
  if (!res.has_header(key)) return fallback;
  try {
    return std::stol(res.get_header_value(key));
  } catch (const std::exception&) {
    return fallback;
  }
}

class Transport {
 public:
  explicit Transport(const GitHubConfig& config)
      : config_(config), client_(host_part(config.base_url)), prefix_(base_path(config.base_url)) {
    if (config_.token.empty()) {
      throw Error(ErrorCode::Auth, "COMMUNITY_PULSE_TOKEN is not set");
    }
    client_.set_connection_timeout(config_.timeout);
    client_.set_read_timeout(config_.timeout);
    client_.set_follow_location(true);
  }

  std::string api_path(const std::string& path) const { return prefix_ + path; }

  /// GET with rate-limit aware retries. Returns nullopt on 404 only when
  /// `allow_missing` is set.
  std::optional<Page> get(const std::string& target, bool raw = false,
                          bool allow_missing = false) {
    httplib::Headers headers{
        {"Authorization", "Bearer " + config_.token},
        {"Accept", raw ? "application/vnd.github.raw+json" : "application/vnd.github+json"},
        {"User-Agent", "community-pulse"},
    };
    long retry_after = 0;
    for (int attempt = 0; attempt < config_.retry.max_attempts; ++attempt) {
      auto res = client_.Get(target, headers);
      if (!res) {
        if (attempt + 1 == config_.retry.max_attempts) {
          throw Error(ErrorCode::Io, "request to " + target + " failed: " +
                                         httplib::to_string(res.error()));
        }
        sleep_for_attempt(attempt, 0);
        continue;
      }
      int status = res->status;
      if (status == 401) throw Error(ErrorCode::Auth, "credential rejected (401)");
      bool limited = status == 429 ||
                     (status == 403 && (res->get_header_value("x-ratelimit-remaining") == "0" ||
                                        res->has_header("Retry-After")));
      if (limited) {
        retry_after = header_long(*res, "Retry-After", -1);
        if (retry_after < 0) {
          long reset = header_long(*res, "x-ratelimit-reset", 0);
          long now = static_cast<long>(now_utc().time_since_epoch().count());
          retry_after = reset > now ? reset - now : 0;
        }
        if (attempt + 1 < config_.retry.max_attempts) sleep_for_attempt(attempt, retry_after);
        continue;
      }
      if (status == 403) throw Error(ErrorCode::Auth, "access forbidden (403) for " + target);
      if (status == 404) {
        if (allow_missing) return std::nullopt;
        throw Error(ErrorCode::NotFound, "not found (404): " + target);
      }
      if (status >= 500) {
        if (attempt + 1 == config_.retry.max_attempts) {
          throw Error(ErrorCode::Io, "server error " + std::to_string(status) + " for " + target);
        }
        sleep_for_attempt(attempt, 0);
        continue;
      }
      if (status < 200 || status >= 300) {
        throw Error(ErrorCode::Io, "unexpected status " + std::to_string(status) + " for " + target);
      }
      Page page;
      if (raw) {
        page.raw = res->body;
      } else {
        try {
          page.body = json::parse(res->body);
        } catch (const json::exception&) {
          throw Error(ErrorCode::Parse, "invalid JSON from " + target);
        }
      }
      if (res->has_header("Link")) {
        if (auto next = next_link(res->get_header_value("Link"))) page.next = request_target(*next);
      }
      return page;
    }
    throw RateLimitedError(retry_after, "rate limited after " +
                                            std::to_string(config_.retry.max_attempts) +
                                            " attempts; retry after " +
                                            std::to_string(retry_after) + "s");
  }

  /// Follows pagination until exhausted or `on_item` returns false.
  template <typename OnItem>
  void paginate(std::string target, OnItem&& on_item) {
    while (true) {
      auto page = get(target);
      if (!page->body.is_array()) throw Error(ErrorCode::Parse, "expected array from " + target);
      bool more = true;
      for (const auto& item : page->body) {
        if (!on_item(item)) {
          more = false;
          break;
        }
      }
      if (!more || !page->next) return;
      target = *page->next;
    }
  }

 private:
  void sleep_for_attempt(int attempt, long retry_after_seconds) {
    auto backoff = config_.retry.base_delay * (1LL << attempt);
    auto wait = std::max<std::chrono::milliseconds>(
        backoff, std::chrono::seconds(retry_after_seconds));
    std::this_thread::sleep_for(std::min(wait, config_.retry.max_delay));
  }

  const GitHubConfig& config_;
  httplib::Client client_;
  std::string prefix_;
};

std::optional<Instant> instant_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  return parse_rfc3339(it->get<std::string>());
}

std::string string_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it != obj.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::string login_of(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_object()) return "";
  return string_field(*it, "login");
}

std::string number_of(const json& item) {
  auto it = item.find("number");
  if (it == item.end()) return string_field(item, "id");
  return it->is_number() ? std::to_string(it->get<long long>()) : it->dump();
}

}  // namespace

GitHubSource::GitHubSource(GitHubConfig config, BotPolicy bots)
    : config_(std::move(config)), bots_(std::move(bots)) {}

std::vector<ContributionEvent> GitHubSource::fetch_events(
    const RepoRef& repo, Instant as_of, std::optional<int> lookback_months) {
  auto from = lookback_start(as_of, lookback_months);
  auto in_range = [&](Instant t) { return t <= as_of && (!from || t >= *from); };
  const std::string per_page = "per_page=" + std::to_string(config_.page_size);
  const std::string repo_path = "/repos/" + repo.owner + "/" + repo.name;

  auto commits = [&] {
    Transport http(config_);
    std::vector<ContributionEvent> out;
    std::string target = http.api_path(repo_path + "/commits?" + per_page +
                                       "&until=" + format_rfc3339(as_of));
    if (from) target += "&since=" + format_rfc3339(*from);
    http.paginate(target, [&](const json& item) {
      const auto& commit = item.value("commit", json::object());
      const auto& author = commit.value("author", json::object());
      auto when = instant_field(author, "date");
      if (!when || !in_range(*when)) return true;
      std::string login = login_of(item, "author");
      ActorId actor = login.empty()
                          ? ActorId{email_identity(string_field(author, "email")), false}
                          : bots_.actor(login);
      if (actor.login.empty() || actor.login == "email:") return true;
      out.push_back({"commit:" + string_field(item, "sha"), actor, EventKind::Commit, *when, repo});
      return true;
    });
    return out;
  };

  auto issues = [&] {
    Transport http(config_);
    std::vector<ContributionEvent> out;
    std::string target =
        http.api_path(repo_path + "/issues?state=all&sort=created&direction=desc&" + per_page);
    if (from) target += "&since=" + format_rfc3339(*from);
    http.paginate(target, [&](const json& item) {
      if (item.contains("pull_request")) return true;
      auto when = instant_field(item, "created_at");
      if (!when) return true;
      if (from && *when < *from) return false;
      if (!in_range(*when)) return true;
      out.push_back({"issue:" + number_of(item), bots_.actor(login_of(item, "user")),
                     EventKind::IssueOpened, *when, repo});
      return true;
    });
    return out;
  };

  auto pulls = [&] {
    Transport http(config_);
    std::vector<ContributionEvent> out;
    std::string target =
        http.api_path(repo_path + "/pulls?state=all&sort=created&direction=desc&" + per_page);
    http.paginate(target, [&](const json& item) {
      auto when = instant_field(item, "created_at");
      if (!when) return true;
      if (from && *when < *from) return false;
      if (!in_range(*when)) return true;
      out.push_back({"pr:" + number_of(item), bots_.actor(login_of(item, "user")),
                     EventKind::PullRequestOpened, *when, repo});
      return true;
    });
    return out;
  };

  auto f_commits = std::async(std::launch::async, commits);
  auto f_issues = std::async(std::launch::async, issues);
  auto f_pulls = std::async(std::launch::async, pulls);

  std::vector<ContributionEvent> events;
  std::exception_ptr failure;
  for (auto* f : {&f_commits, &f_issues, &f_pulls}) {
    try {
      auto part = f->get();
      events.insert(events.end(), part.begin(), part.end());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  events.erase(std::remove_if(events.begin(), events.end(),
                              [](const ContributionEvent& e) { return e.actor.login.empty(); }),
               events.end());
  sort_and_dedup(events);
  return events;
}

std::vector<IssueRecord> GitHubSource::fetch_issues(const RepoRef& repo) {
  Transport http(config_);
  std::vector<IssueRecord> out;
  std::string target = http.api_path("/repos/" + repo.owner + "/" + repo.name +
                                     "/issues?state=all&sort=created&direction=asc&per_page=" +
                                     std::to_string(config_.page_size));
  http.paginate(target, [&](const json& item) {
    if (item.contains("pull_request")) return true;
    auto created = instant_field(item, "created_at");
    if (!created) return true;
    IssueRecord issue;
    issue.issue_id = number_of(item);
    issue.state = string_field(item, "state") == "closed" ? IssueState::Closed : IssueState::Open;
    std::vector<std::string> raw;
    for (const auto& label : item.value("labels", json::array())) {
      if (label.is_string()) {
        raw.push_back(label.get<std::string>());
      } else if (label.is_object()) {
        raw.push_back(string_field(label, "name"));
      }
    }
    issue.labels = normalize_labels(raw);
    issue.created_at = *created;
    out.push_back(std::move(issue));
    return true;
  });
  return out;
}

std::optional<ProjectInfo> GitHubSource::fetch_project(const RepoRef& repo) {
  Transport http(config_);
  const std::string repo_path = http.api_path("/repos/" + repo.owner + "/" + repo.name);
  auto meta = http.get(repo_path);
  ProjectInfo info;
  info.description = string_field(meta->body, "description");
  for (const auto& topic : meta->body.value("topics", json::array())) {
    if (topic.is_string()) info.topics.push_back(topic.get<std::string>());
  }
  if (auto readme = http.get(repo_path + "/readme", true, true)) info.readme = readme->raw;
  return info;
}

}  // namespace cpulse
