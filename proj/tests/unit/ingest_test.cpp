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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "ingest/fixture.hpp"
#include "ingest/source.hpp"
#include "testing/oracles.hpp"
#include "testing/temp_dir.hpp"

using namespace cpulse;

namespace {

const std::filesystem::path kData = CPULSE_TEST_DATA_DIR;

std::size_t count_lines_with(const std::filesystem::path& path, const std::string& needle) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.find(needle) != std::string::npos;
  return n;
}

}  // namespace

TEST_CASE("login normalization and bot flagging") {
  BotPolicy bots;
  CHECK(normalize_login("  Alice ") == "alice");
  CHECK(bots.actor("Dependabot[bot]").is_bot);
  CHECK(bots.actor("renovate").is_bot);
  CHECK_FALSE(bots.actor("botanist").is_bot);
  CHECK(bots.actor("Octocat").login == "octocat");
  CHECK(email_identity("Jane.Doe@example.org") == "email:jane.doe");

  BotPolicy custom({"CI-Runner"});
  CHECK(custom.is_bot("ci-runner"));
  CHECK_FALSE(custom.is_bot("renovate"));
  // Same login, same answer.
  for (int i = 0; i < 3; ++i) CHECK(bots.is_bot("github-actions"));
}

TEST_CASE("label normalization") {
  CHECK(normalize_label("Good First Issue ") == "good-first-issue");
  CHECK(normalize_label("good_first__issue") == "good-first-issue");
  CHECK(normalize_label("  first-timers  only") == "first-timers-only");
  CHECK(normalize_label("--help wanted--") == "help-wanted");
  CHECK(normalize_labels({"Bug", "bug ", "Good First Issue", "good-first-issue"}) ==
        std::vector<std::string>{"bug", "good-first-issue"});
}

TEST_CASE("repo references") {
  auto ref = RepoRef::parse("octo/widgets");
  REQUIRE(ref);
  CHECK(ref->str() == "octo/widgets");
  CHECK(ref->file_stem() == "octo__widgets");
  CHECK_FALSE(RepoRef::parse("octo"));
  CHECK_FALSE(RepoRef::parse("/widgets"));
  CHECK_FALSE(RepoRef::parse("octo/"));
  CHECK_FALSE(RepoRef::parse("oc to/widgets"));
  CHECK_FALSE(RepoRef::parse("a/b/c"));
}

TEST_CASE("fixture with 5 commits, 2 issues and 1 PR yields 8 events") {
  auto path = kData / "eight_events.ndjson";
  // Oracle: count the event lines in the file.
  auto expected = count_lines_with(path, "\"type\":\"event\"");
  REQUIRE(expected == 8);
  auto source = FixtureSource::from_file(path);
  auto as_of = *parse_rfc3339("2021-06-30T23:59:59Z");
  auto events = source.fetch_events(RepoRef{"octo", "widgets"}, as_of, 6);
  CHECK(events.size() == expected);
  auto count = [&](EventKind k) {
    return std::count_if(events.begin(), events.end(), [&](const auto& e) { return e.kind == k; });
  };
  CHECK(count(EventKind::Commit) == 5);
  CHECK(count(EventKind::IssueOpened) == 2);
  CHECK(count(EventKind::PullRequestOpened) == 1);
  CHECK(std::is_sorted(events.begin(), events.end(), event_order));
}

TEST_CASE("fetch_events honours the lookback range and dedups") {
  FixtureContents contents;
  BotPolicy bots;
  RepoRef repo{"octo", "widgets"};
  auto at = [](const char* s) { return *parse_rfc3339(s); };
  contents.events = {
      {"a", bots.actor("x"), EventKind::Commit, at("2020-12-31T23:59:59Z"), repo},
      {"b", bots.actor("x"), EventKind::Commit, at("2021-01-01T00:00:00Z"), repo},
      {"c", bots.actor("x"), EventKind::Commit, at("2021-06-30T00:00:00Z"), repo},
      {"c", bots.actor("x"), EventKind::Commit, at("2021-06-30T00:00:00Z"), repo},
      {"d", bots.actor("x"), EventKind::Commit, at("2021-07-01T00:00:00Z"), repo},
      {"e", bots.actor("y"), EventKind::Commit, at("2021-03-01T00:00:00Z"), RepoRef{"other", "repo"}},
  };
  FixtureSource source(contents);
  auto as_of = at("2021-07-01T00:00:00Z");
  auto events = source.fetch_events(repo, as_of, 6);
  std::vector<std::string> ids;
  for (const auto& e : events) {
    ids.push_back(e.event_id);
    CHECK(e.timestamp <= as_of);
    CHECK(e.timestamp >= add_months(as_of, -6));
  }
  CHECK(ids == std::vector<std::string>{"b", "c", "d"});
  // Idempotent.
  CHECK(source.fetch_events(repo, as_of, 6) == events);
  CHECK(source.fetch_events(repo, as_of, std::nullopt).size() == 4);
}

TEST_CASE("empty repository gives no events or issues") {
  FixtureSource source(FixtureContents{});
  CHECK(source.fetch_events(RepoRef{"a", "b"}, now_utc(), 6).empty());
  CHECK(source.fetch_issues(RepoRef{"a", "b"}).empty());
}

TEST_CASE("fixture issues are normalized") {
  auto contents = load_fixture(kData / "ten_issues.ndjson");
  REQUIRE(contents.issues.size() == 10);
  auto labeled = std::count_if(contents.issues.begin(), contents.issues.end(), [](const auto& i) {
    return std::find(i.labels.begin(), i.labels.end(), "good-first-issue") != i.labels.end();
  });
  CHECK(labeled == 2);
  // "Good First Issue " with trailing space and mixed case.
  CHECK(contents.issues[0].labels == std::vector<std::string>{"good-first-issue"});
}

TEST_CASE("three-line fixture loads three events") {
  std::istringstream in(
      R"({"type":"event","event_id":"1","actor":"A","kind":"commit","timestamp":"2021-01-01T00:00:00Z","repo":"o/n"})"
      "\n"
      R"({"type":"event","event_id":"2","actor":"b","kind":"issue_opened","timestamp":"2021-01-02T00:00:00Z","repo":"o/n"})"
      "\n"
      R"({"type":"event","event_id":"3","actor":"c","kind":"pr_opened","timestamp":"2021-01-03T00:00:00+02:00","repo":"o/n"})"
      "\n");
  auto contents = parse_fixture(in, BotPolicy{}, nullptr);
  REQUIRE(contents.events.size() == 3);
  CHECK(contents.events[0].actor.login == "a");
  CHECK(contents.events[2].kind == EventKind::PullRequestOpened);
  CHECK(format_rfc3339(contents.events[2].timestamp) == "2021-01-02T22:00:00Z");
}

TEST_CASE("malformed line is reported with its line number") {
  auto path = kData / "malformed.ndjson";
  try {
    load_fixture(path);
    FAIL("expected ParseError");
  } catch (const ParseError& ex) {
    CHECK(ex.line() == 2);
    CHECK(std::string(ex.what()).find("line 2") != std::string::npos);
  }
  std::vector<LineDiagnostic> diags;
  auto contents = load_fixture_lenient(path, BotPolicy{}, diags);
  CHECK(contents.events.size() == 3);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].line == 2);
}

TEST_CASE("fixture decoding errors") {
  auto reason = [](const std::string& line) -> std::string {
    std::istringstream in(line);
    try {
      parse_fixture(in, BotPolicy{}, nullptr);
    } catch (const ParseError& ex) {
      return ex.reason();
    }
    return "";
  };
  CHECK(reason(R"({"event_id":"1"})").find("type") != std::string::npos);
  CHECK(reason(R"({"type":"comment"})").find("unsupported") != std::string::npos);
  CHECK(reason(R"({"type":"event","event_id":"1","actor":"a","kind":"fork","timestamp":"2021-01-01T00:00:00Z","repo":"o/n"})")
            .find("kind") != std::string::npos);
  CHECK(reason(R"({"type":"event","event_id":"1","actor":"a","kind":"commit","timestamp":"yesterday","repo":"o/n"})")
            .find("RFC3339") != std::string::npos);
  CHECK(reason(R"({"type":"issue","issue_id":"1","state":"merged","labels":[],"created_at":"2021-01-01T00:00:00Z"})")
            .find("state") != std::string::npos);
  CHECK(reason("not json") == "invalid JSON");
  CHECK_THROWS_AS(load_fixture("/nonexistent/fixture.ndjson"), Error);
}

TEST_CASE("export then load yields identical records") {
  auto history = testing::random_history(7);
  FixtureContents original;
  original.events = history.events;
  original.issues = {{"1", IssueState::Open, {"good-first-issue", "bug"}, history.as_of},
                     {"2", IssueState::Closed, {}, history.as_of}};
  original.project = ProjectInfo{"desc", {"health"}, "# readme\nline two"};
  std::stringstream buf;
  write_fixture(buf, original);
  auto loaded = parse_fixture(buf, BotPolicy{}, nullptr);
  CHECK(loaded.events == original.events);
  CHECK(loaded.issues == original.issues);
  CHECK(loaded.project == original.project);
}

TEST_CASE("next_link picks rel=next") {
  std::string header =
      R"(<https://api.github.com/repos/o/n/commits?page=1>; rel="prev", )"
      R"(<https://api.github.com/repos/o/n/commits?page=3>; rel="next", )"
      R"(<https://api.github.com/repos/o/n/commits?page=9>; rel="last")";
  CHECK(next_link(header) == "https://api.github.com/repos/o/n/commits?page=3");
  CHECK_FALSE(next_link(R"(<https://x/y?page=1>; rel="first")"));
  CHECK_FALSE(next_link(""));
}
