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

// community-pulse command line front end. Talks to the core only through
// the C interface in community_pulse.h.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "community_pulse/community_pulse.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

struct StoreCloser {
  void operator()(cp_store* s) const { cp_store_close(s); }
};
using StoreHandle = std::unique_ptr<cp_store, StoreCloser>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { cp_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

struct Settings {
  std::string repo;
  std::string store;
  std::string fixture;
  std::string membership;
  std::string catalog;
  std::string taxonomy;
  std::string format = "text";
  std::string as_of;
  std::string out;
  int window = 6;
  int threshold = 3;
  int lookback = 0;
  bool full_history = false;
  bool include_members = false;
  bool badge_members = false;
  double coverage_threshold = 10.0;
  // serve
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  // refresh-catalog
  std::string source;
  // act
  std::string id;
  std::string action;
  std::string until;
  std::string state;
};

class CommandError : public std::runtime_error {
 public:
  CommandError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

void check(cp_status status, const std::string& context) {
  if (status == CP_OK || status == CP_PARTIAL) return;
  throw CommandError(kExitFatal, context + ": " + cp_last_error() + " (" +
                                     cp_status_name(status) + ")");
}

int64_t parse_time(const std::string& text) {
  int64_t out = 0;
  check(cp_parse_time(text.c_str(), &out), "--as-of/--until");
  return out;
}

cp_options make_options(const Settings& s) {
  cp_options o;
  cp_options_init(&o);
  o.window_months = s.window;
  o.rising_threshold = s.threshold;
  o.include_members = s.include_members ? 1 : 0;
  o.exclude_members_from_badges = s.badge_members ? 0 : 1;
  o.coverage_threshold_percent = s.coverage_threshold;
  if (!s.as_of.empty()) o.as_of = parse_time(s.as_of);
  o.membership_path = s.membership.empty() ? nullptr : s.membership.c_str();
  o.catalog_path = s.catalog.empty() ? nullptr : s.catalog.c_str();
  o.taxonomy_path = s.taxonomy.empty() ? nullptr : s.taxonomy.c_str();
  return o;
}

/// --repo, else the fixture's repository, else the store file's meta line.
StoreHandle open_store(const Settings& s) {
  std::string repo = s.repo;
  if (repo.empty() && !s.fixture.empty()) {
    OwnedString from_fixture;
    check(cp_fixture_repo(s.fixture.c_str(), &from_fixture.ptr), "reading " + s.fixture);
    repo = from_fixture.str();
  }
  std::string path = s.store;
  std::error_code ec;
  // Same rule as the server: a store file is an existing regular file or
  // anything ending in .ndjson; every other path names a directory.
  bool single_file = std::filesystem::is_regular_file(path, ec) ||
                     std::filesystem::path(path).extension() == ".ndjson";
  if (!path.empty() && !single_file) {
    if (repo.empty()) throw CommandError(kExitFatal, "--store is a directory; pass --repo");
    auto slash = repo.find('/');
    path = (std::filesystem::path(path) /
            (repo.substr(0, slash) + "__" + repo.substr(slash + 1) + ".ndjson"))
               .string();
  }
  if (path.empty() && repo.empty()) {
    throw CommandError(kExitFatal, "pass --repo, --fixture or --store");
  }
  cp_store* raw = nullptr;
  check(cp_store_open(path.empty() ? nullptr : path.c_str(), repo.empty() ? nullptr : repo.c_str(), &raw),
        "opening store");
  return StoreHandle(raw);
}

/// Fixture or live ingestion; returns kExitPartial when input was skipped.
int run_ingest(cp_store* store, const Settings& s, const cp_options& o, bool echo_report) {
  OwnedString report;
  cp_status status;
  if (!s.fixture.empty()) {
    status = cp_ingest_fixture(store, s.fixture.c_str(), &o, 1, 0, &report.ptr);
  } else {
    int lookback = s.full_history ? -1 : s.lookback;
    status = cp_ingest_api(store, &o, lookback, 0, &report.ptr);
  }
  check(status, "ingest");
  if (echo_report) std::cout << report.str() << "\n";
  if (status == CP_PARTIAL) {
    std::cerr << "community-pulse: partial ingestion: " << cp_last_error() << "\n"
              << report.str() << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

cp_format parse_format(const std::string& f) {
  if (f == "json") return CP_FORMAT_JSON;
  if (f == "csv") return CP_FORMAT_CSV;
  return CP_FORMAT_TEXT;
}

int cmd_ingest(const Settings& s) {
  auto o = make_options(s);
  auto store = open_store(s);
  return run_ingest(store.get(), s, o, true);
}

int cmd_analyze(const Settings& s) {
  auto o = make_options(s);
  auto store = open_store(s);
  int code = kExitOk;
  if (!s.fixture.empty()) code = run_ingest(store.get(), s, o, false);
  OwnedString out;
  check(cp_analyze(store.get(), &o, parse_format(s.format), &out.ptr), "analyze");
  std::cout << out.str();
  return code;
}

int cmd_export_trends(const Settings& s) {
  auto o = make_options(s);
  auto store = open_store(s);
  int code = kExitOk;
  if (!s.fixture.empty()) code = run_ingest(store.get(), s, o, false);
  check(cp_export_trends(store.get(), &o, s.out.c_str()), "export-trends");
  return code;
}

int cmd_refresh_catalog(const Settings& s) {
  size_t count = 0;
  check(cp_refresh_catalog(s.source.c_str(), s.out.c_str(), &count), "refresh-catalog");
  std::cerr << "community-pulse: wrote " << count << " labels to " << s.out << "\n";
  return kExitOk;
}

int cmd_act(const Settings& s) {
  auto store = open_store(s);
  cp_action action;
  if (s.action == "accept") action = CP_ACTION_ACCEPT;
  else if (s.action == "dismiss") action = CP_ACTION_DISMISS;
  else if (s.action == "snooze") action = CP_ACTION_SNOOZE;
  else action = CP_ACTION_WAKE;
  int64_t until = s.until.empty() ? 0 : parse_time(s.until);
  OwnedString out;
  check(cp_apply_action(store.get(), s.id.c_str(), action, until, 0, &out.ptr), "act");
  std::cout << out.str() << "\n";
  return kExitOk;
}

int cmd_recommendations(const Settings& s) {
  auto store = open_store(s);
  OwnedString out;
  check(cp_list_recommendations(store.get(), s.state.empty() ? nullptr : s.state.c_str(), &out.ptr),
        "recommendations");
  std::cout << out.str() << "\n";
  return kExitOk;
}

void announce(int port, void* context) {
  const auto* s = static_cast<const Settings*>(context);
  std::cerr << "community-pulse: serving http://" << s->bind << ":" << port << "/api/v1\n";
}

int cmd_serve(const Settings& s) {
  auto o = make_options(s);
  cp_server_options so;
  cp_server_options_init(&so);
  so.bind = s.bind.c_str();
  so.port = s.port;
  std::string store = s.store.empty() ? ".community-pulse" : s.store;
  so.store_path = store.c_str();
  so.static_dir = s.static_dir.empty() ? nullptr : s.static_dir.c_str();
  so.lookback_months = s.lookback;
  so.full_history = s.full_history ? 1 : 0;
  so.on_ready = announce;
  so.context = const_cast<Settings*>(&s);
  check(cp_serve(&so, &o), "serve");
  return kExitOk;
}

void add_analysis_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--repo", s.repo, "Repository as owner/name");
  cmd->add_option("--store", s.store, "Store file or directory");
  cmd->add_option("--window", s.window, "Analysis window in months")->check(CLI::Range(1, 120));
  cmd->add_option("--threshold", s.threshold, "Active months needed to count as rising")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--membership", s.membership, "File of team-member logins")
      ->check(CLI::ExistingFile);
  cmd->add_option("--catalog", s.catalog, "Newcomer label catalog file")->check(CLI::ExistingFile);
  cmd->add_option("--taxonomy", s.taxonomy, "Goal keyword taxonomy file")->check(CLI::ExistingFile);
  cmd->add_option("--as-of", s.as_of, "Analyze as of this RFC3339 instant");
  cmd->add_flag("--include-members", s.include_members, "Keep team members in the rising list");
  cmd->add_flag("--badge-members", s.badge_members,
                "Also recommend rising-contributor badges for team members");
  cmd->add_option("--coverage-threshold", s.coverage_threshold,
                  "Suggest newcomer labels below this open-issue coverage percent");
}

void add_ingest_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--fixture", s.fixture, "NDJSON fixture instead of the live API")
      ->check(CLI::ExistingFile);
  cmd->add_option("--lookback", s.lookback, "Months of history to fetch (default window + 24)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--full-history", s.full_history, "Fetch the full project history");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"community-pulse: newcomer attraction and retention analytics"};
  app.set_version_flag("--version", std::string(cp_version()));
  app.require_subcommand(1);
  Settings s;

  auto* ingest = app.add_subcommand("ingest", "Ingest a fixture or the live API into the store");
  add_analysis_flags(ingest, s);
  add_ingest_flags(ingest, s);

  auto* analyze = app.add_subcommand("analyze", "Print trends, rising contributors, signals and "
                                                "pending recommendations");
  add_analysis_flags(analyze, s);
  analyze->add_option("--fixture", s.fixture, "Ingest this fixture first")->check(CLI::ExistingFile);
  analyze->add_option("--format", s.format, "json, csv or text")
      ->check(CLI::IsMember({"json", "csv", "text"}));

  auto* export_trends = app.add_subcommand("export-trends", "Write the trend series as CSV");
  add_analysis_flags(export_trends, s);
  export_trends->add_option("--fixture", s.fixture, "Ingest this fixture first")
      ->check(CLI::ExistingFile);
  export_trends->add_option("--out", s.out, "Output CSV path")->required();

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  add_analysis_flags(serve, s);
  serve->add_option("--port", s.port, "Listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--bind", s.bind, "Bind address");
  serve->add_option("--static-dir", s.static_dir, "Dashboard assets served under /")
      ->check(CLI::ExistingDirectory);
  serve->add_option("--lookback", s.lookback, "Months of history for live ingest")
      ->check(CLI::NonNegativeNumber);
  serve->add_flag("--full-history", s.full_history, "Live ingest fetches full history");

  auto* refresh = app.add_subcommand("refresh-catalog", "Rebuild the newcomer label catalog");
  refresh->add_option("--source", s.source, "Label list or awesome-for-beginners README (path or URL)")
      ->required();
  refresh->add_option("--out", s.out, "Catalog file to write")->required();

  auto* act = app.add_subcommand("act", "Accept, dismiss, snooze or wake a recommendation");
  act->add_option("--repo", s.repo, "Repository as owner/name");
  act->add_option("--store", s.store, "Store file or directory");
  act->add_option("--id", s.id, "Recommendation id")->required();
  act->add_option("--action", s.action, "accept, dismiss, snooze or wake")
      ->required()
      ->check(CLI::IsMember({"accept", "dismiss", "snooze", "wake"}));
  act->add_option("--until", s.until, "Snooze until this RFC3339 instant (default 30 days)");

  auto* recs = app.add_subcommand("recommendations", "List stored recommendations as JSON");
  recs->add_option("--repo", s.repo, "Repository as owner/name");
  recs->add_option("--store", s.store, "Store file or directory");
  recs->add_option("--state", s.state, "Filter by state")
      ->check(CLI::IsMember({"pending", "accepted", "dismissed", "snoozed"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    // Help and version exit 0; every usage error is fatal (1).
    int code = app.exit(ex);
    return code == 0 ? 0 : kExitFatal;
  }

  try {
    if (s.threshold > s.window) {
      throw CommandError(kExitFatal, "--threshold must not exceed --window");
    }
    if (*ingest) return cmd_ingest(s);
    if (*analyze) return cmd_analyze(s);
    if (*export_trends) return cmd_export_trends(s);
    if (*serve) return cmd_serve(s);
    if (*refresh) return cmd_refresh_catalog(s);
    if (*act) return cmd_act(s);
    if (*recs) return cmd_recommendations(s);
  } catch (const CommandError& ex) {
    std::cerr << "community-pulse: " << ex.what() << "\n";
    return ex.exit_code();
  }
  return kExitFatal;
}
