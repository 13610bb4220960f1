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

#include "report/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace cpulse {

using nlohmann::json;

std::set<std::string> load_membership(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open membership file " + path.string());
  std::set<std::string> logins;
  std::string line;
  while (std::getline(in, line)) {
    auto login = normalize_login(line.substr(0, line.find('#')));
    if (!login.empty()) logins.insert(login);
  }
  return logins;
}

std::vector<RisingContributor> AnalysisResult::visible_rising(bool include_members) const {
  if (include_members) return rising;
  std::vector<RisingContributor> out;
  std::copy_if(rising.begin(), rising.end(), std::back_inserter(out),
               [](const RisingContributor& r) { return !r.is_team_member; });
  return out;
}

AnalysisResult analyze(const StoreSnapshot& snapshot, const AnalysisOptions& options) {
  Instant as_of;
  std::vector<std::string> warnings;
  if (options.as_of) {
    as_of = *options.as_of;
  } else if (snapshot.as_of) {
    as_of = *snapshot.as_of;
  } else {
    as_of = now_utc();
    warnings.push_back("store has no ingested data; analyzing as of the current time");
  }

  AnalysisResult result;
  result.window = AnalysisWindow::ending_at(as_of, options.window_months);
  if (options.rising_threshold < 1 || options.rising_threshold > options.window_months) {
    throw Error(ErrorCode::InvalidArgument, "threshold must be between 1 and the window length");
  }

  auto events = snapshot.sorted_events();
  std::erase_if(events, [&](const ContributionEvent& e) { return e.timestamp > as_of; });
  result.profiles = build_profiles(events, options.membership);
  result.newcomers = detect_newcomers(result.profiles, result.window, snapshot.history_start);
  if (result.newcomers.insufficient_history) {
    warnings.push_back("ingested history starts after the window begins; newcomer counts may be "
                       "inflated (fetch more history or full history)");
  }
  result.trends = cohort_trends(result.profiles, result.newcomers.logins, result.window);
  result.rising = rising_contributors(result.profiles, result.newcomers.logins, result.window,
                                      options.rising_threshold);
  auto issues = snapshot.issue_list();
  result.labels = label_coverage(issues, options.catalog);
  if (snapshot.project) {
    const auto& p = *snapshot.project;
    result.goals = detect_goal_tags(p.readme, p.description, p.topics, options.taxonomy);
  }
  result.warnings = std::move(warnings);
  return result;
}

std::vector<Recommendation> regenerate(const StoreSnapshot& snapshot, const AnalysisResult& result,
                                       const AnalysisOptions& options) {
  std::string readme = snapshot.project ? snapshot.project->readme : std::string();
  GenerateInputs inputs{result.window, result.labels, options.catalog,
                        result.goals,  readme,        result.rising};
  return generate(snapshot.recommendation_list(), inputs, options.generate);
}

json trends_json(const std::vector<MonthlyCohortStats>& trends) {
  json out = json::array();
  for (const auto& t : trends) {
    out.push_back({{"month", format_month(t.month)},
                   {"joined", t.joined},
                   {"active", t.active},
                   {"retained", t.retained}});
  }
  return out;
}

json rising_json(const std::vector<RisingContributor>& rising) {
  json out = json::array();
  for (const auto& r : rising) {
    json months = json::array();
    for (Month m : r.active_months) months.push_back(format_month(m));
    out.push_back({{"login", r.actor.login},
                   {"active_months", months},
                   {"active_month_count", r.active_months.size()},
                   {"totals",
                    {{"commits", r.totals.commits}, {"issues", r.totals.issues}, {"prs", r.totals.prs}}},
                   {"total_events", r.totals.total()},
                   {"detected_at", format_rfc3339(r.detected_at)},
                   {"is_team_member", r.is_team_member}});
  }
  return out;
}

json labels_json(const IssueLabelStats& s) {
  return json{{"total_issues", s.total_issues},
              {"open_issues", s.open_issues},
              {"newcomer_labeled_open", s.newcomer_labeled_open},
              {"matched_labels", s.matched_labels},
              {"coverage_percent", s.coverage_percent}};
}

json goals_json(const std::vector<GoalTag>& goals) {
  json out = json::array();
  for (const auto& g : goals) {
    json evidence = json::array();
    for (const auto& e : g.evidence) {
      evidence.push_back({{"source", to_string(e.source)}, {"term", e.matched_term}});
    }
    out.push_back({{"category", g.category}, {"evidence", evidence}, {"method", "keyword-based"}});
  }
  return out;
}

json recommendations_json(const std::vector<Recommendation>& recs,
                          std::optional<RecommendationState> state) {
  json out = json::array();
  for (const auto& rec : recs) {
    if (!state || rec.state == *state) out.push_back(to_json(rec));
  }
  return out;
}

json analysis_document(const StoreSnapshot& snapshot, const AnalysisResult& result,
                       const AnalysisOptions& options) {
  return json{{"repo", snapshot.repo.str()},
              {"as_of", format_rfc3339(result.window.as_of)},
              {"window",
               {{"months", result.window.window_months},
                {"from", format_month(result.window.first())},
                {"to", format_month(result.window.last())},
                {"threshold", options.rising_threshold}}},
              {"newcomers", result.newcomers.logins.size()},
              {"trends", trends_json(result.trends)},
              {"rising", rising_json(result.visible_rising(options.include_members))},
              {"labels", labels_json(result.labels)},
              {"goals", goals_json(result.goals)},
              {"recommendations", recommendations_json(snapshot.recommendation_list(),
                                                       RecommendationState::Pending)},
              {"warnings", result.warnings}};
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const json& array, const char* sep) {
  std::string out;
  for (const auto& item : array) {
    if (!out.empty()) out += sep;
    out += item.is_string() ? item.get<std::string>() : item.dump();
  }
  return out;
}

}  // namespace

std::string render_text(const json& doc) {
  std::ostringstream out;
  const auto& window = doc["window"];
  out << "Repository " << doc["repo"].get<std::string>() << " as of "
      << doc["as_of"].get<std::string>() << "\n";
  out << "Window " << window["from"].get<std::string>() << ".." << window["to"].get<std::string>()
      << " (" << window["months"] << " months), rising threshold " << window["threshold"] << "\n";
  out << "Newcomers: " << doc["newcomers"] << "\n\n";

  out << "Trends\n";
  char row[128];
  std::snprintf(row, sizeof row, "  %-8s %7s %7s %9s\n", "month", "joined", "active", "retained");
  out << row;
  for (const auto& t : doc["trends"]) {
    std::snprintf(row, sizeof row, "  %-8s %7lld %7lld %9lld\n",
                  t["month"].get<std::string>().c_str(), t["joined"].get<long long>(),
                  t["active"].get<long long>(), t["retained"].get<long long>());
    out << row;
  }

  out << "\nRising contributors\n";
  if (doc["rising"].empty()) out << "  (none)\n";
  for (const auto& r : doc["rising"]) {
    const auto& totals = r["totals"];
    out << "  " << r["login"].get<std::string>() << "  active " << r["active_month_count"] << "/"
        << window["months"] << " months [" << join(r["active_months"], " ") << "]  commits "
        << totals["commits"] << " issues " << totals["issues"] << " prs " << totals["prs"]
        << (r["is_team_member"].get<bool>() ? "  (team member)" : "") << "\n";
  }

  const auto& labels = doc["labels"];
  out << "\nIssue labels\n";
  out << "  issues " << labels["total_issues"] << ", open " << labels["open_issues"]
      << ", newcomer-labeled open " << labels["newcomer_labeled_open"] << ", coverage "
      << labels["coverage_percent"].dump() << "%\n";
  out << "  matched labels: "
      << (labels["matched_labels"].empty() ? "(none)" : join(labels["matched_labels"], ", "))
      << "\n";

  out << "\nGoal tags (keyword-based)\n";
  if (doc["goals"].empty()) out << "  (none)\n";
  for (const auto& g : doc["goals"]) {
    out << "  " << g["category"].get<std::string>() << ":";
    for (const auto& e : g["evidence"]) {
      out << " " << e["source"].get<std::string>() << "=\"" << e["term"].get<std::string>() << "\"";
    }
    out << "\n";
  }

  out << "\nPending recommendations\n";
  if (doc["recommendations"].empty()) out << "  (none)\n";
  for (const auto& rec : doc["recommendations"]) {
    out << "  " << rec["id"].get<std::string>() << "  " << rec["kind"].get<std::string>() << "  "
        << rec["target"].get<std::string>() << "\n";
  }

  if (!doc["warnings"].empty()) {
    out << "\nWarnings\n";
    for (const auto& w : doc["warnings"]) out << "  " << w.get<std::string>() << "\n";
  }
  return out.str();
}

std::string trends_csv(const std::vector<MonthlyCohortStats>& trends) {
  std::string out = "month,joined,active,retained\n";
  for (const auto& t : trends) {
    out += format_month(t.month) + "," + std::to_string(t.joined) + "," +
           std::to_string(t.active) + "," + std::to_string(t.retained) + "\n";
  }
  return out;
}

std::string render_csv(const json& doc) {
  std::ostringstream out;
  out << "# trends\nmonth,joined,active,retained\n";
  for (const auto& t : doc["trends"]) {
    out << t["month"].get<std::string>() << "," << t["joined"] << "," << t["active"] << ","
        << t["retained"] << "\n";
  }
  out << "\n# rising\nlogin,active_months,commits,issues,prs,is_team_member\n";
  for (const auto& r : doc["rising"]) {
    out << csv_field(r["login"].get<std::string>()) << "," << join(r["active_months"], ";") << ","
        << r["totals"]["commits"] << "," << r["totals"]["issues"] << "," << r["totals"]["prs"]
        << "," << r["is_team_member"] << "\n";
  }
  const auto& labels = doc["labels"];
  out << "\n# labels\ntotal_issues,open_issues,newcomer_labeled_open,coverage_percent,matched_labels\n"
      << labels["total_issues"] << "," << labels["open_issues"] << ","
      << labels["newcomer_labeled_open"] << "," << labels["coverage_percent"].dump() << ","
      << csv_field(join(labels["matched_labels"], ";")) << "\n";
  out << "\n# goals\ncategory,source,term\n";
  for (const auto& g : doc["goals"]) {
    for (const auto& e : g["evidence"]) {
      out << g["category"].get<std::string>() << "," << e["source"].get<std::string>() << ","
          << csv_field(e["term"].get<std::string>()) << "\n";
    }
  }
  out << "\n# recommendations\nid,kind,target,state\n";
  for (const auto& rec : doc["recommendations"]) {
    out << rec["id"].get<std::string>() << "," << rec["kind"].get<std::string>() << ","
        << csv_field(rec["target"].get<std::string>()) << "," << rec["state"].get<std::string>()
        << "\n";
  }
  return out.str();
}

json IngestReport::to_json() const {
  json diags = json::array();
  for (const auto& d : diagnostics) diags.push_back({{"line", d.line}, {"reason", d.reason}});
  return json{{"events_new", events_new},
              {"events_skipped", events_skipped},
              {"issues", issues},
              {"newcomers", newcomers},
              {"rising", rising},
              {"recommendations_pending", recommendations_pending},
              {"woken", woken},
              {"diagnostics", diags},
              {"warnings", warnings}};
}

namespace {

/// Analyzes the mutated snapshot, merges recommendations, wakes expired
/// snoozes, and fills the report's derived counts.
void finish_ingest(StoreSnapshot& snap, const AnalysisOptions& options, Instant now,
                   IngestReport& report) {
  auto result = analyze(snap, options);
  auto recs = regenerate(snap, result, options);
  report.woken = wake_expired(recs, now);
  snap.recommendations.clear();
  for (auto& rec : recs) snap.recommendations.emplace(rec.id, std::move(rec));

  report.newcomers = result.newcomers.logins.size();
  report.rising = result.visible_rising(options.include_members).size();
  report.recommendations_pending = static_cast<std::size_t>(
      std::count_if(snap.recommendations.begin(), snap.recommendations.end(),
                    [](const auto& kv) { return kv.second.state == RecommendationState::Pending; }));
  report.issues = snap.issues.size();
  report.warnings.insert(report.warnings.end(), result.warnings.begin(), result.warnings.end());
}

void merge_events(StoreSnapshot& snap, const std::vector<ContributionEvent>& events,
                  IngestReport& report) {
  for (const auto& e : events) {
    if (e.repo != snap.repo) {
      ++report.events_skipped;
      continue;
    }
    if (snap.events.insert_or_assign(e.event_id, e).second) ++report.events_new;
    if (!snap.as_of || e.timestamp > *snap.as_of) snap.as_of = e.timestamp;
  }
}

}  // namespace

IngestReport ingest_fixture(ContributionStore& store, const std::filesystem::path& fixture,
                            const AnalysisOptions& options, bool lenient, Instant now) {
  IngestReport report;
  auto contents = lenient ? load_fixture_lenient(fixture, options.bots, report.diagnostics)
                          : load_fixture(fixture, options.bots);
  store.commit([&](StoreSnapshot& snap) {
    merge_events(snap, contents.events, report);
    for (const auto& issue : contents.issues) {
      snap.issues.insert_or_assign(issue.issue_id, issue);
      if (!snap.as_of) snap.as_of = issue.created_at;
    }
    if (contents.project) snap.project = contents.project;
    finish_ingest(snap, options, now, report);
  });
  if (report.events_skipped > 0) {
    report.warnings.push_back(std::to_string(report.events_skipped) +
                              " events for other repositories were skipped");
  }
  return report;
}

IngestReport ingest_source(ContributionStore& store, EventSource& source,
                           std::optional<int> lookback_months, const AnalysisOptions& options,
                           Instant now) {
  IngestReport report;
  const RepoRef repo = store.repo();
  Instant as_of = options.as_of.value_or(now);
  auto events = source.fetch_events(repo, as_of, lookback_months);

  std::optional<std::vector<IssueRecord>> issues;
  try {
    issues = source.fetch_issues(repo);
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::Auth || ex.code() == ErrorCode::RateLimited) throw;
    report.diagnostics.push_back({0, std::string("issues: ") + ex.what()});
  }
  std::optional<ProjectInfo> project;
  try {
    project = source.fetch_project(repo);
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::Auth || ex.code() == ErrorCode::RateLimited) throw;
    report.diagnostics.push_back({0, std::string("project: ") + ex.what()});
  }

  auto fetched_from = lookback_start(as_of, lookback_months);
  store.commit([&](StoreSnapshot& snap) {
    bool was_empty = snap.events.empty();
    merge_events(snap, events, report);
    if (!snap.as_of || as_of > *snap.as_of) snap.as_of = as_of;
    if (was_empty) {
      snap.history_start = fetched_from;
    } else if (snap.history_start) {
      snap.history_start = fetched_from ? std::min(*snap.history_start, *fetched_from)
                                        : std::optional<Instant>{};
    }
    if (issues) {
      for (auto& issue : *issues) snap.issues.insert_or_assign(issue.issue_id, std::move(issue));
    }
    if (project) snap.project = std::move(project);
    finish_ingest(snap, options, now, report);
  });
  return report;
}

}  // namespace cpulse
