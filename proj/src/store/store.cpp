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

#include "store/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace cpulse {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

}  // namespace

std::vector<ContributionEvent> StoreSnapshot::sorted_events() const {
  std::vector<ContributionEvent> out;
  out.reserve(events.size());
  for (const auto& [id, e] : events) out.push_back(e);
  std::sort(out.begin(), out.end(), event_order);
  return out;
}

std::vector<IssueRecord> StoreSnapshot::issue_list() const {
  std::vector<IssueRecord> out;
  out.reserve(issues.size());
  for (const auto& [id, issue] : issues) out.push_back(issue);
  return out;
}

std::vector<Recommendation> StoreSnapshot::recommendation_list() const {
  std::vector<Recommendation> out;
  out.reserve(recommendations.size());
  for (const auto& [id, rec] : recommendations) out.push_back(rec);
  return out;
}

ContributionStore::ContributionStore(RepoRef repo) : repo_(std::move(repo)) {
  auto snap = std::make_shared<StoreSnapshot>();
  snap->repo = repo_;
  current_ = std::move(snap);
}

std::filesystem::path ContributionStore::default_path(const RepoRef& repo) {
  return std::filesystem::path(".community-pulse") / (repo.file_stem() + ".ndjson");
}

std::optional<RepoRef> ContributionStore::peek_repo(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  while (in && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto obj = json::parse(line);
      if (obj.value("type", "") == "meta" && obj.contains("repo") && obj["repo"].is_string()) {
        return RepoRef::parse(obj["repo"].get<std::string>());
      }
    } catch (const json::exception&) {
    }
    break;
  }
  return std::nullopt;
}

std::unique_ptr<ContributionStore> ContributionStore::open(const std::filesystem::path& path,
                                                           std::optional<RepoRef> repo,
                                                           const BotPolicy& bots) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    if (!repo) {
      throw Error(ErrorCode::InvalidArgument,
                  "store " + path.string() + " does not exist and no repository was given");
    }
    auto store = std::make_unique<ContributionStore>(*repo);
    store->path_ = path;
    return store;
  }

  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open store " + path.string());

  StoreSnapshot snap;
  FixtureContents records;
  bool have_meta = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto obj = json::parse(line);
      auto type = obj.is_object() ? obj.value("type", "") : "";
      if (type == "meta") {
        auto parsed = RepoRef::parse(obj.value("repo", ""));
        if (!parsed) throw std::invalid_argument("meta line lacks a valid repo");
        snap.repo = *parsed;
        if (obj.contains("as_of") && obj["as_of"].is_string()) {
          snap.as_of = parse_rfc3339(obj["as_of"].get<std::string>());
        }
        if (obj.contains("history_start") && obj["history_start"].is_string()) {
          snap.history_start = parse_rfc3339(obj["history_start"].get<std::string>());
        }
        have_meta = true;
      } else if (type == "recommendation") {
        auto rec = recommendation_from_json(obj);
        snap.recommendations[rec.id] = std::move(rec);
      } else {
        decode_record(obj, bots, records);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& ex) {
      std::string reason = dynamic_cast<const json::exception*>(&ex) ? "invalid JSON" : ex.what();
      throw ParseError(line_no, path.string() + ": " + reason);
    }
  }

  if (!have_meta) {
    if (!repo) throw Error(ErrorCode::InvalidArgument, "store " + path.string() + " has no meta line");
    snap.repo = *repo;
  } else if (repo && *repo != snap.repo) {
    throw Error(ErrorCode::InvalidArgument, "store " + path.string() + " belongs to " +
                                                snap.repo.str() + ", not " + repo->str());
  }
  for (auto& e : records.events) snap.events[e.event_id] = std::move(e);
  for (auto& i : records.issues) snap.issues[i.issue_id] = std::move(i);
  snap.project = std::move(records.project);

  auto store = std::make_unique<ContributionStore>(snap.repo);
  store->path_ = path;
  store->current_ = std::make_shared<const StoreSnapshot>(std::move(snap));
  return store;
}

std::shared_ptr<const StoreSnapshot> ContributionStore::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return current_;
}

void ContributionStore::commit(const std::function<void(StoreSnapshot&)>& mutate) {
  std::lock_guard writer(write_mu_);
  auto next = std::make_shared<StoreSnapshot>(*snapshot());
  mutate(*next);
  next->repo = repo_;
  if (!path_.empty()) persist(*next);
  std::lock_guard lock(snapshot_mu_);
  current_ = std::move(next);
}

std::size_t ContributionStore::upsert_events(const std::vector<ContributionEvent>& events) {
  std::size_t fresh = 0;
  commit([&](StoreSnapshot& snap) {
    for (const auto& e : events) {
      auto [it, inserted] = snap.events.insert_or_assign(e.event_id, e);
      if (inserted) ++fresh;
      if (!snap.as_of || e.timestamp > *snap.as_of) snap.as_of = e.timestamp;
    }
  });
  return fresh;
}

std::size_t ContributionStore::upsert_issues(const std::vector<IssueRecord>& issues) {
  std::size_t fresh = 0;
  commit([&](StoreSnapshot& snap) {
    for (const auto& i : issues) {
      if (snap.issues.insert_or_assign(i.issue_id, i).second) ++fresh;
    }
  });
  return fresh;
}

std::vector<ContributionEvent> ContributionStore::query_window(Instant from, Instant to) const {
  if (from > to) throw Error(ErrorCode::InvalidRange, "query window starts after it ends");
  auto snap = snapshot();
  std::vector<ContributionEvent> out;
  for (const auto& [id, e] : snap->events) {
    if (e.timestamp >= from && e.timestamp <= to) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), event_order);
  return out;
}

Recommendation ContributionStore::apply_action(const std::string& id, const Action& action,
                                               Instant now) {
  Recommendation result;
  commit([&](StoreSnapshot& snap) {
    auto it = snap.recommendations.find(id);
    if (it == snap.recommendations.end()) {
      throw Error(ErrorCode::NotFound, "no recommendation with id " + id);
    }
    it->second = apply_transition(it->second, action, now);
    result = it->second;
  });
  return result;
}

std::size_t ContributionStore::wake_expired(Instant now) {
  std::size_t woken = 0;
  commit([&](StoreSnapshot& snap) {
    auto recs = snap.recommendation_list();
    woken = cpulse::wake_expired(recs, now);
    for (auto& rec : recs) snap.recommendations[rec.id] = std::move(rec);
  });
  return woken;
}

std::string ContributionStore::serialize(const StoreSnapshot& snap) {
  std::ostringstream out;
  json meta{{"type", "meta"}, {"format", kFormatVersion}, {"repo", snap.repo.str()}};
  meta["as_of"] = snap.as_of ? json(format_rfc3339(*snap.as_of)) : json(nullptr);
  meta["history_start"] =
      snap.history_start ? json(format_rfc3339(*snap.history_start)) : json(nullptr);
  out << meta.dump() << '\n';

  FixtureContents body;
  body.project = snap.project;
  body.events = snap.sorted_events();
  body.issues = snap.issue_list();
  write_fixture(out, body);
  for (const auto& [id, rec] : snap.recommendations) {
    auto j = to_json(rec);
    j["type"] = "recommendation";
    out << j.dump() << '\n';
  }
  return out.str();
}

void ContributionStore::persist(const StoreSnapshot& snap) const {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << serialize(snap);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot replace " + path_.string() + ": " + ec.message());
}

}  // namespace cpulse
