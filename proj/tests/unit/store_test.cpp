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

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "core/errors.hpp"
#include "store/store.hpp"
#include "testing/oracles.hpp"
#include "testing/temp_dir.hpp"

using namespace cpulse;

namespace {

const RepoRef kRepo{"octo", "widgets"};

ContributionEvent ev(int n, int day) {
  return {"e" + std::to_string(n), ActorId{"user" + std::to_string(n % 3), false},
          EventKind::Commit, testing::instant_at(2021 * 12, day), kRepo};
}

std::vector<ContributionEvent> batch(int from, int to) {
  std::vector<ContributionEvent> out;
  for (int i = from; i < to; ++i) out.push_back(ev(i, 1 + i % 28));
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Recommendation pending_rec(const std::string& id) {
  Recommendation r;
  r.id = id;
  r.target = "good-first-issue";
  r.created_at = r.updated_at = *parse_rfc3339("2021-06-01T00:00:00Z");
  return r;
}

}  // namespace

TEST_CASE("upsert counts only unseen ids") {
  ContributionStore store(kRepo);
  CHECK(store.upsert_events(batch(0, 5)) == 5);
  CHECK(store.upsert_events(batch(0, 5)) == 0);
  CHECK(store.upsert_events(batch(3, 8)) == 3);
  CHECK(store.snapshot()->events.size() == 8);
  CHECK(store.upsert_events({}) == 0);
}

TEST_CASE("upsert overwrites a repeated id and moves the watermark") {
  ContributionStore store(kRepo);
  auto e = ev(1, 3);
  store.upsert_events({e});
  e.kind = EventKind::IssueOpened;
  e.timestamp = testing::instant_at(2021 * 12 + 1, 9);
  CHECK(store.upsert_events({e}) == 0);
  auto snap = store.snapshot();
  CHECK(snap->events.at("e1").kind == EventKind::IssueOpened);
  REQUIRE(snap->as_of.has_value());
  CHECK(*snap->as_of == e.timestamp);
}

TEST_CASE("ingest order does not change the resulting event set") {
  auto all = batch(0, 40);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto shuffled = all;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(seed));
    ContributionStore a(kRepo), b(kRepo);
    a.upsert_events(all);
    std::size_t half = shuffled.size() / 2;
    b.upsert_events({shuffled.begin() + half, shuffled.end()});
    b.upsert_events({shuffled.begin(), shuffled.begin() + half});
    CHECK(a.snapshot()->sorted_events() == b.snapshot()->sorted_events());
  }
}

TEST_CASE("query_window is inclusive on both ends and sorted") {
  ContributionStore store(kRepo);
  auto t0 = *parse_rfc3339("2021-01-01T00:00:00Z");
  std::vector<ContributionEvent> events;
  for (int i = 0; i < 5; ++i) {
    events.push_back({"x" + std::to_string(4 - i), ActorId{"a", false}, EventKind::Commit,
                      t0 + std::chrono::hours(i), kRepo});
  }
  store.upsert_events(events);
  auto hit = store.query_window(t0 + std::chrono::hours(1), t0 + std::chrono::hours(3));
  REQUIRE(hit.size() == 3);
  CHECK(hit.front().timestamp == t0 + std::chrono::hours(1));
  CHECK(hit.back().timestamp == t0 + std::chrono::hours(3));
  CHECK(std::is_sorted(hit.begin(), hit.end(), event_order));
  CHECK(store.query_window(t0, t0).size() == 1);
  CHECK(store.query_window(t0 - std::chrono::hours(5), t0 - std::chrono::hours(1)).empty());
  try {
    store.query_window(t0 + std::chrono::hours(1), t0);
    FAIL("expected InvalidRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRange);
  }
}

TEST_CASE("adjacent windows partition the events") {
  auto h = testing::random_history(7);
  ContributionStore store(RepoRef{"acme", "widgets"});
  store.upsert_events(h.events);
  auto first = testing::instant_at(h.window_first - 12, 1, 0);
  auto mid = testing::instant_at(h.window_first, 1, 0);
  auto end = h.as_of + std::chrono::hours(24);
  auto left = store.query_window(first, mid - std::chrono::seconds(1));
  auto right = store.query_window(mid, end);
  auto whole = store.query_window(first, end);
  CHECK(left.size() + right.size() == whole.size());
  left.insert(left.end(), right.begin(), right.end());
  CHECK(left == whole);
}

TEST_CASE("store file round-trips and rejects a different repository") {
  testing::TempDir dir;
  auto path = dir / "octo__widgets.ndjson";
  {
    auto store = ContributionStore::open(path, kRepo);
    store->upsert_events(batch(0, 6));
    store->upsert_issues({IssueRecord{"1", IssueState::Open, {"good-first-issue"},
                                      *parse_rfc3339("2021-01-02T00:00:00Z")}});
    store->commit([](StoreSnapshot& s) {
      s.recommendations["rec-1"] = pending_rec("rec-1");
      s.project = ProjectInfo{"desc", {"health"}, "# readme"};
    });
  }
  auto text = read_file(path);
  CHECK(nlohmann::json::parse(text.substr(0, text.find('\n')))["type"] == "meta");
  CHECK(ContributionStore::peek_repo(path) == kRepo);

  auto reopened = ContributionStore::open(path, std::nullopt);
  auto snap = reopened->snapshot();
  CHECK(snap->events.size() == 6);
  CHECK(snap->issues.size() == 1);
  CHECK(snap->recommendations.at("rec-1") == pending_rec("rec-1"));
  REQUIRE(snap->project.has_value());
  CHECK(snap->project->topics == std::vector<std::string>{"health"});
  CHECK(ContributionStore::serialize(*snap) == text);

  CHECK_THROWS_AS(ContributionStore::open(path, RepoRef{"other", "repo"}), Error);
  CHECK_THROWS_AS(ContributionStore::open(dir / "new.ndjson", std::nullopt), Error);
}

TEST_CASE("a corrupt store file reports the line") {
  testing::TempDir dir;
  auto path = dir / "bad.ndjson";
  std::ofstream(path) << "{\"type\":\"meta\",\"format\":1,\"repo\":\"octo/widgets\"}\n{oops\n";
  try {
    ContributionStore::open(path, std::nullopt);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("a failed mutation leaves the snapshot and file untouched") {
  testing::TempDir dir;
  auto path = dir / "s.ndjson";
  auto store = ContributionStore::open(path, kRepo);
  store->upsert_events(batch(0, 3));
  auto before = store->snapshot();
  auto text = read_file(path);
  CHECK_THROWS(store->commit([](StoreSnapshot& s) {
    s.events.clear();
    throw std::runtime_error("boom");
  }));
  CHECK(store->snapshot() == before);
  CHECK(read_file(path) == text);
}

TEST_CASE("readers keep their snapshot while writers commit") {
  ContributionStore store(kRepo);
  store.upsert_events(batch(0, 2));
  auto held = store.snapshot();
  std::thread writer([&] { store.upsert_events(batch(2, 50)); });
  writer.join();
  CHECK(held->events.size() == 2);
  CHECK(store.snapshot()->events.size() == 50);
}

TEST_CASE("apply_action and wake_expired go through the store") {
  ContributionStore store(kRepo);
  store.commit([](StoreSnapshot& s) { s.recommendations["r"] = pending_rec("r"); });
  auto now = *parse_rfc3339("2021-07-01T00:00:00Z");
  auto snoozed = store.apply_action("r", Action{ActionType::Snooze, std::nullopt}, now);
  CHECK(snoozed.state == RecommendationState::Snoozed);
  CHECK(*snoozed.snooze_until == now + kDefaultSnooze);
  CHECK(store.wake_expired(now) == 0);
  CHECK(store.wake_expired(now + kDefaultSnooze) == 1);
  CHECK(store.snapshot()->recommendations.at("r").state == RecommendationState::Pending);
  try {
    store.apply_action("missing", Action{}, now);
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
}
