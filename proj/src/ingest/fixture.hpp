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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ingest/model.hpp"

namespace cpulse {

struct FixtureContents {
  std::vector<ContributionEvent> events;
  std::vector<IssueRecord> issues;
  std::optional<ProjectInfo> project;
};

struct LineDiagnostic {
  std::size_t line = 0;
  std::string reason;
};

nlohmann::json to_json(const ContributionEvent& event);
nlohmann::json to_json(const IssueRecord& issue);
nlohmann::json to_json(const ProjectInfo& project);

/// Decodes one event/issue/project object into `out`. Throws
/// std::invalid_argument with a reason when the object is malformed or
/// carries an unsupported "type".
void decode_record(const nlohmann::json& object, const BotPolicy& bots,
                   FixtureContents& out);

/// Strict load: the first malformed line raises ParseError with its line
/// number. Records keep file order. Blank lines are skipped.
FixtureContents load_fixture(const std::filesystem::path& path,
                             const BotPolicy& bots = {});

/// Lenient load: malformed lines are skipped and reported.
FixtureContents load_fixture_lenient(const std::filesystem::path& path,
                                     const BotPolicy& bots,
                                     std::vector<LineDiagnostic>& diagnostics);

FixtureContents parse_fixture(std::istream& in, const BotPolicy& bots,
                              std::vector<LineDiagnostic>* diagnostics);

/// Writes project (if any), events, then issues, one JSON object per line.
void write_fixture(std::ostream& out, const FixtureContents& contents);

}  // namespace cpulse
