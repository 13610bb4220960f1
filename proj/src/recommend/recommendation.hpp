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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "analytics/analytics.hpp"
#include "core/time.hpp"
#include "signals/signals.hpp"

namespace cpulse {

enum class RecommendationKind { AddNewcomerLabel, AddGoalBadge, RisingContributorBadge };
enum class RecommendationState { Pending, Accepted, Dismissed, Snoozed };

const char* to_string(RecommendationKind kind) noexcept;
const char* to_string(RecommendationState state) noexcept;
std::optional<RecommendationKind> parse_recommendation_kind(std::string_view text);
std::optional<RecommendationState> parse_recommendation_state(std::string_view text);

struct Recommendation {
  std::string id;
  RecommendationKind kind = RecommendationKind::AddNewcomerLabel;
  std::string target;
  nlohmann::json rationale = nlohmann::json::object();
  RecommendationState state = RecommendationState::Pending;
  std::optional<Instant> snooze_until;  // set iff state == Snoozed
  Instant created_at{};
  Instant updated_at{};

  bool operator==(const Recommendation&) const = default;
};

/// Stable id derived from (kind, target, window months).
std::string recommendation_id(RecommendationKind kind, std::string_view target,
                              const AnalysisWindow& window);

/// API/store representation without the "type" discriminator.
nlohmann::json to_json(const Recommendation& rec);
/// Throws std::invalid_argument on malformed input.
Recommendation recommendation_from_json(const nlohmann::json& object);

enum class ActionType { Accept, Dismiss, Snooze, Wake };

const char* to_string(ActionType action) noexcept;
std::optional<ActionType> parse_action_type(std::string_view text);

struct Action {
  ActionType type = ActionType::Accept;
  std::optional<Instant> until;  // Snooze only; defaults to now + 30 days
};

inline constexpr std::chrono::days kDefaultSnooze{30};

/// Legal moves: Pending -> {Accepted, Dismissed, Snoozed} and
/// Snoozed -> Pending via Wake. Everything else is illegal.
bool is_legal(RecommendationState from, ActionType action) noexcept;

/// Returns the updated record. Throws Error(IllegalTransition) or
/// Error(InvalidSnooze) when until <= now.
Recommendation apply_transition(const Recommendation& rec, const Action& action, Instant now);

/// Snoozed items whose snooze_until <= now return to Pending. Returns how
/// many changed.
std::size_t wake_expired(std::vector<Recommendation>& recs, Instant now);

struct GenerateConfig {
  double coverage_threshold_percent = 10.0;
  bool exclude_members = true;
};

struct GenerateInputs {
  const AnalysisWindow& window;
  const IssueLabelStats& labels;
  const LabelCatalog& catalog;
  const std::vector<GoalTag>& goals;
  std::string_view readme;
  const std::vector<RisingContributor>& rising;
};

/// README already carries a goal badge for `category`: either the marker
/// comment or the shields.io badge image.
bool readme_has_goal_badge(std::string_view readme, std::string_view category);
std::string goal_badge_markdown(std::string_view category);

/// Merges fresh recommendations into `existing`. Records already present
/// keep their state and content; new ones start Pending with timestamps
/// at window.as_of. Output sorted by (kind, target, id).
std::vector<Recommendation> generate(const std::vector<Recommendation>& existing,
                                     const GenerateInputs& inputs, const GenerateConfig& config);

}  // namespace cpulse
