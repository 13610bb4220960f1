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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "analytics/analytics.hpp"
#include "core/errors.hpp"
#include "recommend/recommendation.hpp"
#include "report/report.hpp"
#include "signals/signals.hpp"
#include "store/store.hpp"
#include "testing/oracles.hpp"
#include "testing/run_cli.hpp"
#include "testing/running_server.hpp"
#include "testing/temp_dir.hpp"

using namespace cpulse;
using nlohmann::json;

namespace {

constexpr int kFixtures = 1000;
const std::filesystem::path kData = CPULSE_TEST_DATA_DIR;

/// Collects the first few mismatches for the failure line.
struct Outcome {
  bool ok = true;
  std::vector<std::string> notes;
  std::string detail;

  void fail(const std::string& why) {
    ok = false;
    if (notes.size() < 3) notes.push_back(why);
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::set<std::string> logins(const std::vector<RisingContributor>& rising) {
  std::set<std::string> out;
  for (const auto& r : rising) out.insert(r.actor.login);
  return out;
}

std::string show(const std::set<std::string>& s) {
  std::string out = "{";
  for (const auto& x : s) out += (out.size() > 1 ? "," : "") + x;
  return out + "}";
}

/// Runs the analytics pipeline exactly as ingestion does: store, then analyze.
AnalysisResult pipeline(const testing::RandomHistory& h, int threshold) {
  ContributionStore store(RepoRef{"acme", "widgets"});
  store.upsert_events(h.events);
  AnalysisOptions opts;
  opts.as_of = h.as_of;
  opts.rising_threshold = threshold;
  return analyze(*store.snapshot(), opts);
}

Outcome rising_rule() {
  Outcome o;
  auto start = std::chrono::steady_clock::now();
  for (int seed = 1; seed <= kFixtures; ++seed) {
    auto h = testing::random_history(seed);
    auto got = logins(pipeline(h, 3).rising);
    auto expected = testing::oracle_rising(h.events, h.window_first, h.window_last, 3);
    if (got != expected) o.fail("seed " + std::to_string(seed) + ": " + show(got) + " vs " + show(expected));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.expect(secs < 10.0, "took " + std::to_string(secs) + "s");
  std::ostringstream d;
  d.precision(2);
  d << std::fixed << kFixtures << " fixtures in " << secs << "s";
  o.detail = d.str();
  return o;
}

Outcome newcomer_definition() {
  Outcome o;
  long checked = 0;
  for (int seed = 1; seed <= kFixtures; ++seed) {
    auto h = testing::random_history(seed, 20, 6, 18);
    auto result = pipeline(h, 3);
    for (const auto& e : h.events) {
      if (testing::month_index(e.timestamp) < h.window_first) {
        ++checked;
        if (result.newcomers.logins.count(e.actor.login)) {
          o.fail("seed " + std::to_string(seed) + ": " + e.actor.login + " has pre-window history");
        }
      }
    }
    if (result.newcomers.logins != testing::oracle_newcomers(h.events, h.window_first, h.window_last)) {
      o.fail("seed " + std::to_string(seed) + ": newcomer set differs from brute force");
    }
  }
  o.detail = std::to_string(checked) + " pre-window events checked";
  return o;
}

Outcome trend_invariants() {
  Outcome o;
  for (int seed = 1; seed <= kFixtures; ++seed) {
    auto h = testing::random_history(seed);
    auto result = pipeline(h, 3);
    long joined = 0;
    auto tag = "seed " + std::to_string(seed) + ": ";
    for (const auto& row : result.trends) {
      o.expect(row.joined <= row.active, tag + "joined > active in " + format_month(row.month));
      o.expect(row.retained <= row.joined, tag + "retained > joined in " + format_month(row.month));
      joined += row.joined;
    }
    o.expect(joined == static_cast<long>(result.newcomers.logins.size()), tag + "sum joined != |newcomers|");
    o.expect(!result.trends.empty() && result.trends.back().retained == 0, tag + "final month retained != 0");
    o.expect(result.trends.size() == 6, tag + "window rows != 6");
  }
  o.detail = std::to_string(kFixtures) + " fixtures";
  return o;
}

std::string title_case(std::string s) {
  bool start = true;
  for (auto& c : s) {
    if (start) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    start = c == ' ';
  }
  return s;
}

Outcome label_coverage_criterion() {
  Outcome o;
  auto catalog = LabelCatalog::builtin();
  std::vector<IssueRecord> issues;
  for (int i = 0; i < 10; ++i) {
    std::vector<std::string> raw{"bug"};
    if (i == 3) raw.push_back("Good First Issue");
    if (i == 7) raw.push_back("first-timers-only");
    issues.push_back({std::to_string(i), IssueState::Open, normalize_labels(raw), Instant{}});
  }
  auto stats = label_coverage(issues, catalog);
  o.expect(stats.coverage_percent == 20.0, "coverage " + std::to_string(stats.coverage_percent));
  int variants = 0;
  for (const auto& label : catalog.labels) {
    std::string spaced = label;
    std::replace(spaced.begin(), spaced.end(), '-', ' ');
    for (const auto& v : {spaced, title_case(spaced), " " + title_case(spaced) + "  ", label}) {
      ++variants;
      o.expect(normalize_label(v) == label, "\"" + v + "\" normalized to \"" + normalize_label(v) + "\"");
      std::vector<IssueRecord> one{{"1", IssueState::Open, normalize_labels({v}), Instant{}}};
      o.expect(label_coverage(one, catalog).coverage_percent == 100.0, "\"" + v + "\" not counted");
    }
  }
  o.expect(normalize_label("Good First Issue") == "good-first-issue", "Good First Issue");
  o.detail = "coverage 20.0, " + std::to_string(variants) + " label variants over " +
             std::to_string(catalog.labels.size()) + " catalog entries";
  return o;
}

Outcome state_machine() {
  Outcome o;
  using S = RecommendationState;
  const Instant now = *parse_rfc3339("2021-07-01T00:00:00Z");
  const std::map<std::pair<S, ActionType>, std::optional<S>> table{
      {{S::Pending, ActionType::Accept}, S::Accepted},   {{S::Pending, ActionType::Dismiss}, S::Dismissed},
      {{S::Pending, ActionType::Snooze}, S::Snoozed},    {{S::Pending, ActionType::Wake}, std::nullopt},
      {{S::Accepted, ActionType::Accept}, std::nullopt}, {{S::Accepted, ActionType::Dismiss}, std::nullopt},
      {{S::Accepted, ActionType::Snooze}, std::nullopt}, {{S::Accepted, ActionType::Wake}, std::nullopt},
      {{S::Dismissed, ActionType::Accept}, std::nullopt}, {{S::Dismissed, ActionType::Dismiss}, std::nullopt},
      {{S::Dismissed, ActionType::Snooze}, std::nullopt}, {{S::Dismissed, ActionType::Wake}, std::nullopt},
      {{S::Snoozed, ActionType::Accept}, std::nullopt},  {{S::Snoozed, ActionType::Dismiss}, std::nullopt},
      {{S::Snoozed, ActionType::Snooze}, std::nullopt},  {{S::Snoozed, ActionType::Wake}, S::Pending},
  };
  for (const auto& [key, expected] : table) {
    auto [from, action] = key;
    Recommendation rec;
    rec.id = "rec-x";
    rec.state = from;
    if (from == S::Snoozed) rec.snooze_until = now + std::chrono::days{1};
    std::string tag = std::string(to_string(from)) + "+" + to_string(action);
    try {
      auto next = apply_transition(rec, Action{action, std::nullopt}, now);
      o.expect(expected.has_value(), tag + " was allowed");
      if (expected) {
        o.expect(next.state == *expected, tag + " wrong state");
        o.expect(next.snooze_until.has_value() == (next.state == S::Snoozed), tag + " snooze_until invariant");
      }
    } catch (const Error& e) {
      o.expect(!expected && e.code() == ErrorCode::IllegalTransition, tag + " raised " + e.what());
    }
  }

  // wake_expired is idempotent.
  std::vector<Recommendation> recs(3);
  for (int i = 0; i < 3; ++i) {
    recs[i].id = "r" + std::to_string(i);
    recs[i].state = S::Snoozed;
    recs[i].snooze_until = now + std::chrono::hours(i - 1);  // expired, due now, future
  }
  auto first = wake_expired(recs, now);
  auto snapshot = recs;
  auto second = wake_expired(recs, now);
  o.expect(first == 2, "first wake woke " + std::to_string(first));
  o.expect(second == 0 && recs == snapshot, "second wake changed state");

  // Dismissed survives regeneration through the real ingest pipeline.
  ContributionStore store(RepoRef{"octo", "widgets"});
  AnalysisOptions opts;
  ingest_fixture(store, kData / "small.ndjson", opts, false, now);
  auto ids = store.snapshot()->recommendation_list();
  if (ids.empty()) {
    o.fail("no recommendations generated");
  } else {
    for (const auto& r : ids) store.apply_action(r.id, Action{ActionType::Dismiss, std::nullopt}, now);
    for (int round = 0; round < 3; ++round) ingest_fixture(store, kData / "small.ndjson", opts, false, now);
    for (const auto& r : store.snapshot()->recommendation_list()) {
      o.expect(r.state == S::Dismissed, r.id + " resurrected as " + to_string(r.state));
    }
    o.expect(store.snapshot()->recommendations.size() == ids.size(), "regeneration added duplicates");
  }
  o.detail = std::to_string(table.size()) + " transitions, wake idempotent, " + std::to_string(ids.size()) +
             " dismissed kept across 3 regenerations";
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_history(const std::filesystem::path& path, const testing::RandomHistory& h) {
  FixtureContents contents;
  contents.events = h.events;
  for (int i = 0; i < 8; ++i) {
    contents.issues.push_back({std::to_string(100 + i), i % 3 ? IssueState::Open : IssueState::Closed,
                               i == 2 ? std::vector<std::string>{"good-first-issue"} : std::vector<std::string>{},
                               h.as_of - std::chrono::days{i}});
  }
  contents.project = ProjectInfo{"Tools for school students", {"education"}, "# Widgets\nClimate data."};
  std::ofstream out(path);
  write_fixture(out, contents);
}

/// fixture -> store -> analytics -> generate, as canonical JSON text plus
/// the store file bytes.
std::pair<std::string, std::string> full_run(const std::filesystem::path& fixture, const RepoRef& repo,
                                             std::optional<Instant> as_of) {
  testing::TempDir dir;
  auto store = ContributionStore::open(dir / "store.ndjson", repo);
  AnalysisOptions opts;
  opts.as_of = as_of;
  ingest_fixture(*store, fixture, opts, false, *parse_rfc3339("2024-01-01T00:00:00Z"));
  auto snap = store->snapshot();
  auto result = analyze(*snap, opts);
  json doc = analysis_document(*snap, result, opts);
  doc["all_recommendations"] = recommendations_json(regenerate(*snap, result, opts), std::nullopt);
  return {doc.dump(), slurp(dir / "store.ndjson")};
}

Outcome determinism() {
  Outcome o;
  testing::TempDir dir;
  int runs = 0;
  auto compare = [&](const std::filesystem::path& fixture, const RepoRef& repo, std::optional<Instant> as_of,
                     const std::string& tag) {
    auto a = full_run(fixture, repo, as_of);
    auto b = full_run(fixture, repo, as_of);
    o.expect(a.first == b.first, tag + ": analysis JSON differs");
    o.expect(a.second == b.second, tag + ": store bytes differ");
    ++runs;
  };
  compare(kData / "small.ndjson", RepoRef{"octo", "widgets"}, std::nullopt, "small.ndjson");
  for (int seed = 1; seed <= 25; ++seed) {
    auto h = testing::random_history(seed);
    auto path = dir / ("h" + std::to_string(seed) + ".ndjson");
    write_history(path, h);
    compare(path, RepoRef{"acme", "widgets"}, h.as_of, "seed " + std::to_string(seed));
  }
  o.detail = std::to_string(runs) + " fixtures, byte-identical across paired runs";
  return o;
}

Outcome cross_interface() {
  Outcome o;
  testing::TempDir dir;
  int compared = 0;
  auto check = [&](const std::filesystem::path& fixture, const std::string& repo,
                   const std::vector<std::string>& extra, const std::string& query,
                   const std::set<std::string>& membership, const std::string& tag) {
    auto store = dir / (tag + ".ndjson");
    std::vector<std::string> args{"ingest", "--fixture", fixture.string(), "--store", store.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    auto ingest = testing::run_cli(args);
    o.expect(ingest.exit_code == 0, tag + ": CLI ingest exit " + std::to_string(ingest.exit_code));

    args = {"analyze", "--store", store.string(), "--format", "json"};
    args.insert(args.end(), extra.begin(), extra.end());
    auto cli = testing::run_cli(args);
    if (cli.exit_code != 0) {
      o.fail(tag + ": CLI analyze exit " + std::to_string(cli.exit_code));
      return;
    }
    json doc = json::parse(cli.out);

    ServerOptions server;
    server.store = store;
    server.analysis.membership = membership;
    testing::RunningServer running(server);
    auto get = [&](const std::string& path) -> json {
      auto r = running.get("/api/v1/projects/" + repo + path);
      if (!r || r->status != 200) {
        o.fail(tag + ": GET " + path + " failed");
        return nullptr;
      }
      return json::parse(r->body);
    };
    const std::string q = query.empty() ? "" : "?" + query;
    const std::string amp = query.empty() ? "?" : "?" + query + "&";
    o.expect(get("/trends" + q) == doc["trends"], tag + ": trends differ");
    o.expect(get("/rising" + q) == doc["rising"], tag + ": rising differ");
    o.expect(get("/labels" + q) == doc["labels"], tag + ": labels differ");
    o.expect(get("/goals" + q) == doc["goals"], tag + ": goals differ");
    o.expect(get("/recommendations" + amp + "state=pending") == doc["recommendations"],
             tag + ": recommendations differ");
    ++compared;
  };

  auto members = kData / "members.txt";
  check(kData / "small.ndjson", "octo/widgets", {}, "", {}, "small");
  check(kData / "small.ndjson", "octo/widgets", {"--membership", members.string()}, "",
        load_membership(members), "small-members");
  check(kData / "small.ndjson", "octo/widgets", {"--window", "4", "--threshold", "2"}, "window=4&threshold=2",
        {}, "small-w4");
  for (int seed = 1; seed <= 5; ++seed) {
    auto h = testing::random_history(seed);
    auto path = dir / ("h" + std::to_string(seed) + ".fixture.ndjson");
    write_history(path, h);
    auto as_of = format_rfc3339(h.as_of);
    check(path, "acme/widgets", {"--as-of", as_of}, "as_of=" + as_of, {}, "seed" + std::to_string(seed));
  }
  o.detail = std::to_string(compared) + " snapshots, 5 endpoints each";
  return o;
}

Outcome threshold_monotonicity() {
  Outcome o;
  for (int seed = 1; seed <= kFixtures; ++seed) {
    auto h = testing::random_history(seed);
    auto r3 = logins(pipeline(h, 3).rising);
    auto r4 = logins(pipeline(h, 4).rising);
    o.expect(std::includes(r3.begin(), r3.end(), r4.begin(), r4.end()),
             "seed " + std::to_string(seed) + ": " + show(r4) + " not within " + show(r3));
  }
  o.detail = std::to_string(kFixtures) + " fixtures";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"rising rule", rising_rule},
      {"newcomer definition", newcomer_definition},
      {"trend invariants", trend_invariants},
      {"label coverage", label_coverage_criterion},
      {"recommendation state machine", state_machine},
      {"determinism", determinism},
      {"cross-interface", cross_interface},
      {"threshold monotonicity", threshold_monotonicity},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o.fail(std::string("exception: ") + ex.what());
    }
    std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first;
    if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
    for (const auto& note : o.notes) std::cout << "\n       " << note;
    std::cout << std::endl;
    if (!o.ok) ++failures;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures;
}
