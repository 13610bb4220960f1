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

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace cpulse {

/// A UTC instant at one-second resolution.
using Instant = std::chrono::sys_seconds;

/// A UTC calendar month.
using Month = std::chrono::year_month;

/// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and a
/// "Z" or "+HH:MM"/"-HH:MM" suffix. Offsets are folded into UTC.
std::optional<Instant> parse_rfc3339(std::string_view text);

/// Always renders UTC as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Instant t);

Month month_of(Instant t);
Instant month_start(Month m);
/// Last second belonging to month m.
Instant month_end(Month m);

std::string format_month(Month m);
std::optional<Month> parse_month(std::string_view text);

/// Shifts by whole calendar months, clamping the day to the target month's
/// length and keeping the time of day.
Instant add_months(Instant t, int months);

Instant now_utc();

}  // namespace cpulse
