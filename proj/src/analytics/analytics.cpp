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

#include "analytics/analytics.hpp"

#include <algorithm>
#include <tuple>

#include "core/errors.hpp"

namespace cpulse {

void KindCounts::add(EventKind kind) {
  switch (kind) {
    case EventKind::Commit: ++commits; break;
    case EventKind::IssueOpened: ++issues; break;
    case EventKind::PullRequestOpened: ++prs; break;
  }
}

KindCounts& KindCounts::operator+=(const KindCounts& other) {
  commits += other.commits;
  issues += other.issues;
  prs += other.prs;
  return *this;
}

AnalysisWindow AnalysisWindow::ending_at(Instant as_of, int window_months) {
  if (window_months < 1) {
    throw Error(ErrorCode::InvalidArgument, "window must be at least one month");
  }
  AnalysisWindow w;
  w.as_of = as_of;
  w.window_months = window_months;
  Month last = month_of(as_of);
  for (int i = window_months - 1; i >= 0; --i) {
    w.months.push_back(last - std::chrono::months{i});
  }
  return w;
}

std::vector<ContributorProfile> build_profiles(std::span<const ContributionEvent> events,
                                               const std::set<std::string>& membership) {
  std::map<std::string, ContributorProfile> by_login;
  for (const auto& e : events) {
    if (e.actor.is_bot) continue;
    Month m = month_of(e.timestamp);
    auto [it, fresh] = by_login.try_emplace(e.actor.login);
    auto& profile = it->second;
    if (fresh) {
      profile.actor = e.actor;
      profile.first_contribution_month = m;
      profile.is_team_member = membership.count(e.actor.login) > 0;
    } else if (m < profile.first_contribution_month) {
      profile.first_contribution_month = m;
    }
    profile.monthly_counts[m].add(e.kind);
  }
  std::vector<ContributorProfile> out;
  out.reserve(by_login.size());
  for (auto& [login, profile] : by_login) out.push_back(std::move(profile));
  return out;
}

NewcomerResult detect_newcomers(std::span<const ContributorProfile> profiles,
                                const AnalysisWindow& window,
                                std::optional<Instant> history_start) {
  NewcomerResult result;
  result.insufficient_history = history_start && *history_start > month_start(window.first());
  for (const auto& p : profiles) {
    if (!p.actor.is_bot && window.contains(p.first_contribution_month)) {
      result.logins.insert(p.actor.login);
    }
  }
  return result;
}

namespace {

bool active_in(const ContributorProfile& p, Month m) {
  auto it = p.monthly_counts.find(m);
  return it != p.monthly_counts.end() && it->second.total() > 0;
}

}  // namespace

std::vector<MonthlyCohortStats> cohort_trends(std::span<const ContributorProfile> profiles,
                                              const std::set<std::string>& newcomers,
                                              const AnalysisWindow& window) {
  std::map<Month, MonthlyCohortStats> stats;
  for (Month m : window.months) stats[m].month = m;

  for (const auto& p : profiles) {
    if (!newcomers.count(p.actor.login)) continue;
    bool later_activity = false;
    // Walk backwards so "active in some later window month" is known when
    // reaching the joining month.
    for (auto m = window.months.rbegin(); m != window.months.rend(); ++m) {
      bool active = active_in(p, *m);
      auto& s = stats[*m];
      if (active) ++s.active;
      if (p.first_contribution_month == *m) {
        ++s.joined;
        if (later_activity) ++s.retained;
      }
      later_activity = later_activity || active;
    }
  }

  std::vector<MonthlyCohortStats> out;
  out.reserve(stats.size());
  for (auto& [m, s] : stats) out.push_back(s);
  return out;
}

std::vector<RisingContributor> rising_contributors(std::span<const ContributorProfile> profiles,
                                                   const std::set<std::string>& newcomers,
                                                   const AnalysisWindow& window, int threshold) {
  if (threshold < 1 || threshold > window.window_months) {
    throw Error(ErrorCode::InvalidArgument,
                "threshold must be between 1 and the window length");
  }
  std::vector<RisingContributor> out;
  for (const auto& p : profiles) {
    if (p.actor.is_bot || !newcomers.count(p.actor.login)) continue;
    RisingContributor r;
    r.actor = p.actor;
    r.is_team_member = p.is_team_member;
    r.detected_at = window.as_of;
    for (Month m : window.months) {
      if (active_in(p, m)) r.active_months.push_back(m);
    }
    if (static_cast<int>(r.active_months.size()) < threshold) continue;
    r.totals = activity_summary(p, window);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const RisingContributor& a, const RisingContributor& b) {
    auto key = [](const RisingContributor& r) {
      return std::make_tuple(-static_cast<long>(r.active_months.size()), -r.totals.total());
    };
    if (key(a) != key(b)) return key(a) < key(b);
    return a.actor.login < b.actor.login;
  });
  return out;
}

KindCounts activity_summary(const ContributorProfile& profile, const AnalysisWindow& window) {
  KindCounts sum;
  for (const auto& [m, counts] : profile.monthly_counts) {
    if (window.contains(m)) sum += counts;
  }
  return sum;
}

}  // namespace cpulse
