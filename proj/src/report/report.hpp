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

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "analytics/analytics.hpp"
#include "ingest/source.hpp"
#include "recommend/recommendation.hpp"
#include "signals/signals.hpp"
#include "store/store.hpp"

namespace cpulse {

struct AnalysisOptions {
  int window_months = 6;
  int rising_threshold = 3;
  /// Overrides the store watermark when set.
  std::optional<Instant> as_of;
  std::set<std::string> membership;
  bool include_members = false;
  LabelCatalog catalog = LabelCatalog::builtin();
  GoalTaxonomy taxonomy = builtin_taxonomy();
  GenerateConfig generate;
  BotPolicy bots;
};

/// Logins from a membership file: one per line, '#' comments allowed.
std::set<std::string> load_membership(const std::filesystem::path& path);

struct AnalysisResult {
  AnalysisWindow window;
  std::vector<ContributorProfile> profiles;
  NewcomerResult newcomers;
  std::vector<MonthlyCohortStats> trends;
  std::vector<RisingContributor> rising;  // before the membership filter
  IssueLabelStats labels;
  std::vector<GoalTag> goals;
  std::vector<std::string> warnings;

  std::vector<RisingContributor> visible_rising(bool include_members) const;
};

/// Throws Error(InvalidArgument) for a bad window or threshold.
AnalysisResult analyze(const StoreSnapshot& snapshot, const AnalysisOptions& options);

/// Recommendations after merging freshly generated ones into the snapshot's.
std::vector<Recommendation> regenerate(const StoreSnapshot& snapshot, const AnalysisResult& result,
                                       const AnalysisOptions& options);

nlohmann::json trends_json(const std::vector<MonthlyCohortStats>& trends);
nlohmann::json rising_json(const std::vector<RisingContributor>& rising);
nlohmann::json labels_json(const IssueLabelStats& stats);
nlohmann::json goals_json(const std::vector<GoalTag>& goals);
nlohmann::json recommendations_json(const std::vector<Recommendation>& recs,
                                    std::optional<RecommendationState> state);

/// The full analyze document: repo, as_of, window, newcomers, trends,
/// rising, labels, goals, and pending recommendations.
nlohmann::json analysis_document(const StoreSnapshot& snapshot, const AnalysisResult& result,
                                 const AnalysisOptions& options);

std::string render_text(const nlohmann::json& document);
std::string render_csv(const nlohmann::json& document);
/// "month,joined,active,retained" plus one row per month.
std::string trends_csv(const std::vector<MonthlyCohortStats>& trends);

struct IngestReport {
  std::size_t events_new = 0;
  std::size_t events_skipped = 0;  // other repositories
  std::size_t issues = 0;
  std::size_t newcomers = 0;
  std::size_t rising = 0;
  std::size_t recommendations_pending = 0;
  std::size_t woken = 0;
  std::vector<LineDiagnostic> diagnostics;
  std::vector<std::string> warnings;

  bool partial() const { return !diagnostics.empty(); }
  nlohmann::json to_json() const;
};

/// Loads a fixture into the store, then regenerates recommendations and
/// wakes expired snoozes, all in one commit. `lenient` skips malformed
/// lines (reported in diagnostics) instead of raising ParseError.
IngestReport ingest_fixture(ContributionStore& store, const std::filesystem::path& fixture,
                            const AnalysisOptions& options, bool lenient, Instant now);

/// Same pipeline fed from an EventSource. `lookback_months` of nullopt
/// fetches full history.
IngestReport ingest_source(ContributionStore& store, EventSource& source,
                           std::optional<int> lookback_months, const AnalysisOptions& options,
                           Instant now);

/// Default history depth for live fetches: window plus 24 months.
inline int default_lookback_months(int window_months) { return window_months + 24; }

}  // namespace cpulse
