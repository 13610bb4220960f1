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

#include "ingest/fixture.hpp"

#include <fstream>
#include <stdexcept>

#include "core/errors.hpp"

namespace cpulse {

using nlohmann::json;

namespace {

const std::string& require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::invalid_argument(std::string("missing field \"") + key + "\"");
  if (!it->is_string()) throw std::invalid_argument(std::string("field \"") + key + "\" must be a string");
  return it->get_ref<const std::string&>();
}

Instant require_instant(const json& obj, const char* key) {
  const auto& text = require_string(obj, key);
  auto t = parse_rfc3339(text);
  if (!t) throw std::invalid_argument(std::string("field \"") + key + "\" is not RFC3339: " + text);
  return *t;
}

std::vector<std::string> string_list(const json& obj, const char* key) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw std::invalid_argument(std::string("field \"") + key + "\" must be an array");
  for (const auto& item : *it) {
    if (!item.is_string()) throw std::invalid_argument(std::string("field \"") + key + "\" must hold strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

json to_json(const ContributionEvent& e) {
  return json{{"type", "event"},
              {"event_id", e.event_id},
              {"actor", e.actor.login},
              {"kind", to_string(e.kind)},
              {"timestamp", format_rfc3339(e.timestamp)},
              {"repo", e.repo.str()}};
}

json to_json(const IssueRecord& issue) {
  return json{{"type", "issue"},
              {"issue_id", issue.issue_id},
              {"state", to_string(issue.state)},
              {"labels", issue.labels},
              {"created_at", format_rfc3339(issue.created_at)}};
}

json to_json(const ProjectInfo& project) {
  return json{{"type", "project"},
              {"description", project.description},
              {"topics", project.topics},
              {"readme", project.readme}};
}

void decode_record(const json& obj, const BotPolicy& bots, FixtureContents& out) {
  if (!obj.is_object()) throw std::invalid_argument("record is not a JSON object");
  const auto& type = require_string(obj, "type");
  if (type == "event") {
    ContributionEvent e;
    e.event_id = require_string(obj, "event_id");
    if (e.event_id.empty()) throw std::invalid_argument("empty event_id");
    e.actor = bots.actor(require_string(obj, "actor"));
    if (e.actor.login.empty()) throw std::invalid_argument("empty actor");
    auto kind = parse_event_kind(require_string(obj, "kind"));
    if (!kind) throw std::invalid_argument("unknown kind \"" + obj["kind"].get<std::string>() + "\"");
    e.kind = *kind;
    e.timestamp = require_instant(obj, "timestamp");
    auto repo = RepoRef::parse(require_string(obj, "repo"));
    if (!repo) throw std::invalid_argument("repo must be owner/name");
    e.repo = *repo;
    out.events.push_back(std::move(e));
  } else if (type == "issue") {
    IssueRecord issue;
    issue.issue_id = require_string(obj, "issue_id");
    if (issue.issue_id.empty()) throw std::invalid_argument("empty issue_id");
    auto state = parse_issue_state(require_string(obj, "state"));
    if (!state) throw std::invalid_argument("state must be open or closed");
    issue.state = *state;
    issue.labels = normalize_labels(string_list(obj, "labels"));
    issue.created_at = require_instant(obj, "created_at");
    out.issues.push_back(std::move(issue));
  } else if (type == "project") {
    ProjectInfo project;
    if (obj.contains("description") && obj["description"].is_string()) {
      project.description = obj["description"].get<std::string>();
    }
    if (obj.contains("readme") && obj["readme"].is_string()) {
      project.readme = obj["readme"].get<std::string>();
    }
    project.topics = string_list(obj, "topics");
    out.project = std::move(project);
  } else {
    throw std::invalid_argument("unsupported record type \"" + type + "\"");
  }
}

FixtureContents parse_fixture(std::istream& in, const BotPolicy& bots,
                              std::vector<LineDiagnostic>* diagnostics) {
  FixtureContents out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto obj = json::parse(line);
      decode_record(obj, bots, out);
    } catch (const std::exception& ex) {
      std::string reason = ex.what();
      if (dynamic_cast<const json::exception*>(&ex)) reason = "invalid JSON";
      if (!diagnostics) throw ParseError(line_no, reason);
      diagnostics->push_back({line_no, reason});
    }
  }
  return out;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

FixtureContents load_fixture(const std::filesystem::path& path, const BotPolicy& bots) {
  auto in = open_input(path);
  return parse_fixture(in, bots, nullptr);
}

FixtureContents load_fixture_lenient(const std::filesystem::path& path,
                                     const BotPolicy& bots,
                                     std::vector<LineDiagnostic>& diagnostics) {
  auto in = open_input(path);
  return parse_fixture(in, bots, &diagnostics);
}

void write_fixture(std::ostream& out, const FixtureContents& contents) {
  if (contents.project) out << to_json(*contents.project).dump() << '\n';
  for (const auto& e : contents.events) out << to_json(e).dump() << '\n';
  for (const auto& i : contents.issues) out << to_json(i).dump() << '\n';
}

}  // namespace cpulse
