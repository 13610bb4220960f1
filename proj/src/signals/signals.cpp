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

#include "signals/signals.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace cpulse {

namespace builtin_data {
extern const char* const kNewcomerLabels;
extern const char* const kGoalTaxonomy;
}  // namespace builtin_data

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  return line.substr(0, line.find('#'));
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    auto nl = text.find('\n');
    out.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool word_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u >= 0x80;
}

}  // namespace

LabelCatalog LabelCatalog::parse(std::string_view text, std::string source_note) {
  LabelCatalog catalog;
  catalog.source_note = std::move(source_note);
  for (auto line : lines_of(text)) {
    auto label = normalize_label(trim(strip_comment(line)));
    if (!label.empty()) catalog.labels.insert(std::move(label));
  }
  if (catalog.labels.empty()) throw Error(ErrorCode::InvalidArgument, "label catalog is empty");
  for (const char* required : {"good-first-issue", "first-timers-only"}) {
    if (!catalog.contains(required)) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("label catalog must contain \"") + required + "\"");
    }
  }
  return catalog;
}

LabelCatalog LabelCatalog::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

LabelCatalog LabelCatalog::builtin() {
  return parse(builtin_data::kNewcomerLabels, "builtin awesome-for-beginners snapshot");
}

IssueLabelStats label_coverage(std::span<const IssueRecord> issues, const LabelCatalog& catalog) {
  IssueLabelStats stats;
  for (const auto& issue : issues) {
    ++stats.total_issues;
    bool flagged = false;
    for (const auto& label : issue.labels) {
      auto norm = normalize_label(label);
      if (catalog.contains(norm)) {
        flagged = true;
        stats.matched_labels.insert(norm);
      }
    }
    if (issue.state == IssueState::Open) {
      ++stats.open_issues;
      if (flagged) ++stats.newcomer_labeled_open;
    }
  }
  if (stats.open_issues > 0) {
    stats.coverage_percent = 100.0 * static_cast<double>(stats.newcomer_labeled_open) /
                             static_cast<double>(stats.open_issues);
  }
  return stats;
}

const char* to_string(GoalSource source) noexcept {
  switch (source) {
    case GoalSource::Readme: return "readme";
    case GoalSource::Description: return "description";
    case GoalSource::Topics: return "topics";
  }
  return "readme";
}

GoalTaxonomy parse_taxonomy(std::string_view text) {
  GoalTaxonomy taxonomy;
  std::size_t line_no = 0;
  for (auto raw : lines_of(text)) {
    ++line_no;
    auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "expected \"category: keywords\"");
    auto category = normalize_label(trim(line.substr(0, colon)));
    if (category.empty()) throw ParseError(line_no, "empty category");
    auto& keywords = taxonomy[category];
    auto rest = line.substr(colon + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      auto keyword = lower(trim(rest.substr(0, comma)));
      if (!keyword.empty() &&
          std::find(keywords.begin(), keywords.end(), keyword) == keywords.end()) {
        keywords.push_back(std::move(keyword));
      }
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (keywords.empty()) throw ParseError(line_no, "category \"" + category + "\" has no keywords");
  }
  if (taxonomy.empty()) throw Error(ErrorCode::InvalidArgument, "goal taxonomy is empty");
  return taxonomy;
}

GoalTaxonomy load_taxonomy(const std::filesystem::path& path) {
  return parse_taxonomy(read_file(path));
}

GoalTaxonomy builtin_taxonomy() { return parse_taxonomy(builtin_data::kGoalTaxonomy); }

bool contains_whole_word(std::string_view text, std::string_view term) {
  if (term.empty()) return false;
  auto hay = lower(text);
  auto needle = lower(term);
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
    bool left_ok = pos == 0 || !word_char(hay[pos - 1]);
    auto end = pos + needle.size();
    bool right_ok = end == hay.size() || !word_char(hay[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

std::vector<GoalTag> detect_goal_tags(std::string_view readme, std::string_view description,
                                      std::span<const std::string> topics,
                                      const GoalTaxonomy& taxonomy) {
  std::vector<GoalTag> tags;
  for (const auto& [category, keywords] : taxonomy) {
    GoalTag tag{category, {}};
    for (const auto& kw : keywords) {
      if (contains_whole_word(readme, kw)) tag.evidence.push_back({GoalSource::Readme, kw});
    }
    for (const auto& kw : keywords) {
      if (contains_whole_word(description, kw)) tag.evidence.push_back({GoalSource::Description, kw});
    }
    for (const auto& kw : keywords) {
      bool hit = std::any_of(topics.begin(), topics.end(),
                             [&](const std::string& t) { return contains_whole_word(t, kw); });
      if (hit) tag.evidence.push_back({GoalSource::Topics, kw});
    }
    if (!tag.evidence.empty()) tags.push_back(std::move(tag));
  }
  std::stable_sort(tags.begin(), tags.end(), [](const GoalTag& a, const GoalTag& b) {
    return a.evidence.size() > b.evidence.size();
  });
  return tags;
}

std::vector<std::string> extract_catalog_labels(std::string_view source_text) {
  std::set<std::string> labels;
  for (auto raw : lines_of(source_text)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto lowered = lower(line);
    auto marker = lowered.find("label:");
    if (marker == std::string::npos) marker = lowered.find("labels:");
    if (marker != std::string::npos) {
      // awesome-for-beginners style: "... _(label: good first issue)_"
      auto start = lowered.find(':', marker) + 1;
      auto stop = lowered.find_first_of(")_", start);
      auto body = line.substr(start, stop == std::string::npos ? std::string_view::npos : stop - start);
      while (!body.empty()) {
        auto comma = body.find(',');
        auto label = normalize_label(trim(body.substr(0, comma)));
        label.erase(std::remove(label.begin(), label.end(), '`'), label.end());
        if (!label.empty()) labels.insert(label);
        if (comma == std::string_view::npos) break;
        body.remove_prefix(comma + 1);
      }
      continue;
    }
    if (line.front() == '-' || line.front() == '*' ||
        line.front() == '[' || line.front() == '|' || line.front() == '<') {
      continue;
    }
    auto label = normalize_label(line);
    if (!label.empty()) labels.insert(label);
  }
  return {labels.begin(), labels.end()};
}

std::string render_catalog(const std::vector<std::string>& labels) {
  std::string out = "# Newcomer-friendly issue labels, one normalized label per line.\n";
  for (const auto& label : labels) out += label + "\n";
  return out;
}

}  // namespace cpulse
