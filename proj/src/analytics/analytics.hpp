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

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "core/time.hpp"
#include "ingest/model.hpp"

namespace cpulse {

struct KindCounts {
  long commits = 0;
  long issues = 0;
  long prs = 0;

  long total() const { return commits + issues + prs; }
  void add(EventKind kind);
  KindCounts& operator+=(const KindCounts& other);
  bool operator==(const KindCounts&) const = default;
};

/// The trailing `window_months` calendar months ending with the month that
/// contains `as_of`. All month arithmetic is UTC.
struct AnalysisWindow {
  Instant as_of{};
  int window_months = 6;
  std::vector<Month> months;

  /// Throws Error(InvalidArgument) when window_months < 1.
  static AnalysisWindow ending_at(Instant as_of, int window_months = 6);

  Month first() const { return months.front(); }
  Month last() const { return months.back(); }
  bool contains(Month m) const { return m >= first() && m <= last(); }
};

struct ContributorProfile {
  ActorId actor;
  Month first_contribution_month{};
  std::map<Month, KindCounts> monthly_counts;
  bool is_team_member = false;
};

struct MonthlyCohortStats {
  Month month{};
  long joined = 0;
  long active = 0;
  long retained = 0;

  bool operator==(const MonthlyCohortStats&) const = default;
};

struct RisingContributor {
  ActorId actor;
  std::vector<Month> active_months;  // ascending, all inside the window
  KindCounts totals;
  Instant detected_at{};
  bool is_team_member = false;
};

struct NewcomerResult {
  std::set<std::string> logins;
  /// Supplied history starts after the window does, so some "newcomers"
  /// may have unseen earlier contributions.
  bool insufficient_history = false;
};

/// One profile per non-bot actor, sorted by login. Counts are bucketed by
/// the UTC calendar month of each event.
std::vector<ContributorProfile> build_profiles(std::span<const ContributionEvent> events,
                                               const std::set<std::string>& membership);

/// Actors whose first contribution month lies inside the window.
/// `history_start` is the earliest instant covered by the supplied events;
/// nullopt means complete history.
NewcomerResult detect_newcomers(std::span<const ContributorProfile> profiles,
                                const AnalysisWindow& window,
                                std::optional<Instant> history_start = std::nullopt);

/// Joined/active/retained newcomer counts per window month, chronological.
/// Retention only looks at later months inside the window.
std::vector<MonthlyCohortStats> cohort_trends(std::span<const ContributorProfile> profiles,
                                              const std::set<std::string>& newcomers,
                                              const AnalysisWindow& window);

/// Newcomers active in at least `threshold` distinct window months, sorted
/// by active-month count desc, total events desc, then login asc.
/// Throws Error(InvalidArgument) unless 1 <= threshold <= window_months.
std::vector<RisingContributor> rising_contributors(std::span<const ContributorProfile> profiles,
                                                   const std::set<std::string>& newcomers,
                                                   const AnalysisWindow& window,
                                                   int threshold = 3);

/// Per-kind totals over the window months only.
KindCounts activity_summary(const ContributorProfile& profile, const AnalysisWindow& window);

}  // namespace cpulse
