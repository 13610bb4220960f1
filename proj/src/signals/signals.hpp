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
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ingest/model.hpp"

namespace cpulse {

/// Normalized newcomer-friendly issue labels.
struct LabelCatalog {
  std::set<std::string> labels;
  std::string source_note;

  bool contains(std::string_view normalized) const {
    return labels.count(std::string(normalized)) > 0;
  }

  /// One label per line, '#' starts a comment. Entries are normalized.
  /// Throws Error(InvalidArgument) if the result is empty or lacks
  /// "good-first-issue" or "first-timers-only".
  static LabelCatalog parse(std::string_view text, std::string source_note = {});
  static LabelCatalog load(const std::filesystem::path& path);
  /// The snapshot compiled in from data/newcomer_labels.txt.
  static LabelCatalog builtin();
};

struct IssueLabelStats {
  long total_issues = 0;
  long open_issues = 0;
  long newcomer_labeled_open = 0;
  std::set<std::string> matched_labels;
  double coverage_percent = 0.0;
};

/// Open-issue coverage by catalog labels plus which catalog labels the
/// project uses anywhere.
IssueLabelStats label_coverage(std::span<const IssueRecord> issues, const LabelCatalog& catalog);

enum class GoalSource { Readme, Description, Topics };

const char* to_string(GoalSource source) noexcept;

struct GoalEvidence {
  GoalSource source = GoalSource::Readme;
  std::string matched_term;

  bool operator==(const GoalEvidence&) const = default;
};

struct GoalTag {
  std::string category;
  std::vector<GoalEvidence> evidence;

  bool operator==(const GoalTag&) const = default;
};

/// category -> lowercase keywords (keywords may span several words).
using GoalTaxonomy = std::map<std::string, std::vector<std::string>>;

/// Lines of "category: keyword, keyword, ..."; '#' comments allowed.
GoalTaxonomy parse_taxonomy(std::string_view text);
GoalTaxonomy load_taxonomy(const std::filesystem::path& path);
GoalTaxonomy builtin_taxonomy();

/// True when `term` occurs in `text` case-insensitively with no letter or
/// digit directly before or after it.
bool contains_whole_word(std::string_view text, std::string_view term);

/// Keyword-based goal detection. Evidence holds one entry per distinct
/// (source, term) hit; tags are ordered by evidence count desc, then
/// category name.
std::vector<GoalTag> detect_goal_tags(std::string_view readme, std::string_view description,
                                      std::span<const std::string> topics,
                                      const GoalTaxonomy& taxonomy);

/// Pulls label names out of either a plain list or the awesome-for-beginners
/// README ("_(label: good first issue)_"). Returns normalized, sorted,
/// deduplicated labels.
std::vector<std::string> extract_catalog_labels(std::string_view source_text);

/// Renders a catalog file body for `labels`.
std::string render_catalog(const std::vector<std::string>& labels);

}  // namespace cpulse
