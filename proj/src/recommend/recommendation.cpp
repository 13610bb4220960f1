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

#include "recommend/recommendation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "core/errors.hpp"

namespace cpulse {

using nlohmann::json;

const char* to_string(RecommendationKind kind) noexcept {
  switch (kind) {
    case RecommendationKind::AddNewcomerLabel: return "add_newcomer_label";
    case RecommendationKind::AddGoalBadge: return "add_goal_badge";
    case RecommendationKind::RisingContributorBadge: return "rising_contributor_badge";
  }
  return "add_newcomer_label";
}

const char* to_string(RecommendationState state) noexcept {
  switch (state) {
    case RecommendationState::Pending: return "pending";
    case RecommendationState::Accepted: return "accepted";
    case RecommendationState::Dismissed: return "dismissed";
    case RecommendationState::Snoozed: return "snoozed";
  }
  return "pending";
}

std::optional<RecommendationKind> parse_recommendation_kind(std::string_view text) {
  for (auto k : {RecommendationKind::AddNewcomerLabel, RecommendationKind::AddGoalBadge,
                 RecommendationKind::RisingContributorBadge}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<RecommendationState> parse_recommendation_state(std::string_view text) {
  for (auto s : {RecommendationState::Pending, RecommendationState::Accepted,
                 RecommendationState::Dismissed, RecommendationState::Snoozed}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string recommendation_id(RecommendationKind kind, std::string_view target,
                              const AnalysisWindow& window) {
  std::string key = std::string(to_string(kind)) + "|" + std::string(target) + "|" +
                    format_month(window.first()) + ".." + format_month(window.last());
  // 64-bit FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "rec-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const Recommendation& rec) {
  json j{{"id", rec.id},
         {"kind", to_string(rec.kind)},
         {"target", rec.target},
         {"rationale", rec.rationale},
         {"state", to_string(rec.state)},
         {"created_at", format_rfc3339(rec.created_at)},
         {"updated_at", format_rfc3339(rec.updated_at)}};
  j["snooze_until"] = rec.snooze_until ? json(format_rfc3339(*rec.snooze_until)) : json(nullptr);
  return j;
}

namespace {

std::string str_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("missing string field \"") + key + "\"");
  }
  return it->get<std::string>();
}

Instant instant_field(const json& obj, const char* key) {
  auto t = parse_rfc3339(str_field(obj, key));
  if (!t) throw std::invalid_argument(std::string("field \"") + key + "\" is not RFC3339");
  return *t;
}

}  // namespace

Recommendation recommendation_from_json(const json& obj) {
  if (!obj.is_object()) throw std::invalid_argument("recommendation is not an object");
  Recommendation rec;
  rec.id = str_field(obj, "id");
  auto kind = parse_recommendation_kind(str_field(obj, "kind"));
  if (!kind) throw std::invalid_argument("unknown recommendation kind");
  rec.kind = *kind;
  rec.target = str_field(obj, "target");
  rec.rationale = obj.value("rationale", json::object());
  auto state = parse_recommendation_state(str_field(obj, "state"));
  if (!state) throw std::invalid_argument("unknown recommendation state");
  rec.state = *state;
  if (obj.contains("snooze_until") && !obj["snooze_until"].is_null()) {
    rec.snooze_until = instant_field(obj, "snooze_until");
  }
  if ((rec.state == RecommendationState::Snoozed) != rec.snooze_until.has_value()) {
    throw std::invalid_argument("snooze_until must be present exactly when snoozed");
  }
  rec.created_at = instant_field(obj, "created_at");
  rec.updated_at = instant_field(obj, "updated_at");
  return rec;
}

const char* to_string(ActionType action) noexcept {
  switch (action) {
    case ActionType::Accept: return "accept";
    case ActionType::Dismiss: return "dismiss";
    case ActionType::Snooze: return "snooze";
    case ActionType::Wake: return "wake";
  }
  return "accept";
}

std::optional<ActionType> parse_action_type(std::string_view text) {
  for (auto a : {ActionType::Accept, ActionType::Dismiss, ActionType::Snooze, ActionType::Wake}) {
    if (text == to_string(a)) return a;
  }
  return std::nullopt;
}

bool is_legal(RecommendationState from, ActionType action) noexcept {
  switch (from) {
    case RecommendationState::Pending: return action != ActionType::Wake;
    case RecommendationState::Snoozed: return action == ActionType::Wake;
    case RecommendationState::Accepted:
    case RecommendationState::Dismissed: return false;
  }
  return false;
}

Recommendation apply_transition(const Recommendation& rec, const Action& action, Instant now) {
  if (!is_legal(rec.state, action.type)) {
    throw Error(ErrorCode::IllegalTransition, std::string("cannot ") + to_string(action.type) +
                                                  " a " + to_string(rec.state) + " recommendation");
  }
  Recommendation out = rec;
  out.updated_at = now;
  out.snooze_until.reset();
  switch (action.type) {
    case ActionType::Accept: out.state = RecommendationState::Accepted; break;
    case ActionType::Dismiss: out.state = RecommendationState::Dismissed; break;
    case ActionType::Wake: out.state = RecommendationState::Pending; break;
    case ActionType::Snooze: {
      Instant until = action.until.value_or(now + kDefaultSnooze);
      if (until <= now) {
        throw Error(ErrorCode::InvalidSnooze, "snooze time must be in the future");
      }
      out.state = RecommendationState::Snoozed;
      out.snooze_until = until;
      break;
    }
  }
  return out;
}

std::size_t wake_expired(std::vector<Recommendation>& recs, Instant now) {
  std::size_t woken = 0;
  for (auto& rec : recs) {
    if (rec.state == RecommendationState::Snoozed && rec.snooze_until && *rec.snooze_until <= now) {
      rec.state = RecommendationState::Pending;
      rec.snooze_until.reset();
      rec.updated_at = now;
      ++woken;
    }
  }
  return woken;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

json months_json(const std::vector<Month>& months) {
  json out = json::array();
  for (Month m : months) out.push_back(format_month(m));
  return out;
}

json counts_json(const KindCounts& c) {
  return json{{"commits", c.commits}, {"issues", c.issues}, {"prs", c.prs}};
}

}  // namespace

std::string goal_badge_markdown(std::string_view category) {
  std::string cat(category);
  return "<!-- community-pulse:badge:" + cat + " -->\n![" + cat +
         "](https://img.shields.io/badge/oss4sg-" + cat + "-brightgreen)";
}

bool readme_has_goal_badge(std::string_view readme, std::string_view category) {
  auto text = lower(readme);
  auto cat = lower(category);
  if (text.find("<!-- community-pulse:badge:" + cat + " -->") != std::string::npos) return true;
  return text.find("img.shields.io/badge/oss4sg-" + cat + "-") != std::string::npos;
}

std::vector<Recommendation> generate(const std::vector<Recommendation>& existing,
                                     const GenerateInputs& in, const GenerateConfig& config) {
  std::map<std::string, Recommendation> by_id;
  for (const auto& rec : existing) by_id.emplace(rec.id, rec);

  auto propose = [&](RecommendationKind kind, const std::string& target, json rationale) {
    Recommendation rec;
    rec.id = recommendation_id(kind, target, in.window);
    if (by_id.count(rec.id)) return;
    rec.kind = kind;
    rec.target = target;
    rec.rationale = std::move(rationale);
    rec.created_at = in.window.as_of;
    rec.updated_at = in.window.as_of;
    by_id.emplace(rec.id, std::move(rec));
  };

  if (in.labels.coverage_percent < config.coverage_threshold_percent) {
    json coverage{{"total_issues", in.labels.total_issues},
                  {"open_issues", in.labels.open_issues},
                  {"newcomer_labeled_open", in.labels.newcomer_labeled_open},
                  {"matched_labels", in.labels.matched_labels},
                  {"coverage_percent", in.labels.coverage_percent},
                  {"threshold_percent", config.coverage_threshold_percent}};
    for (const auto& label : in.catalog.labels) {
      if (!in.labels.matched_labels.count(label)) {
        propose(RecommendationKind::AddNewcomerLabel, label, coverage);
      }
    }
  }

  for (const auto& tag : in.goals) {
    if (readme_has_goal_badge(in.readme, tag.category)) continue;
    json evidence = json::array();
    for (const auto& e : tag.evidence) {
      evidence.push_back({{"source", to_string(e.source)}, {"term", e.matched_term}});
    }
    propose(RecommendationKind::AddGoalBadge, tag.category,
            json{{"category", tag.category},
                 {"evidence", evidence},
                 {"method", "keyword-based"},
                 {"badge_markdown", goal_badge_markdown(tag.category)}});
  }

  for (const auto& r : in.rising) {
    if (config.exclude_members && r.is_team_member) continue;
    propose(RecommendationKind::RisingContributorBadge, r.actor.login,
            json{{"active_months", months_json(r.active_months)},
                 {"totals", counts_json(r.totals)},
                 {"window", {{"from", format_month(in.window.first())},
                             {"to", format_month(in.window.last())}}}});
  }

  std::vector<Recommendation> out;
  out.reserve(by_id.size());
  for (auto& [id, rec] : by_id) out.push_back(std::move(rec));
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return std::tie(a.target, a.id) < std::tie(b.target, b.id);
  });
  return out;
}

}  // namespace cpulse
