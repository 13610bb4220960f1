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

#include "core/time.hpp"

#include <charconv>
#include <cstdio>

namespace cpulse {

namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return res.ec == std::errc{};
}

}  // namespace

std::optional<Instant> parse_rfc3339(std::string_view s) {
  int y, mo, d, h, mi, sec;
  if (!read_int(s, 0, 4, y) || s.size() < 19 || s[4] != '-' ||
      !read_int(s, 5, 2, mo) || s[7] != '-' || !read_int(s, 8, 2, d) ||
      (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
      !read_int(s, 11, 2, h) || s[13] != ':' || !read_int(s, 14, 2, mi) ||
      s[16] != ':' || !read_int(s, 17, 2, sec)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  int offset_minutes = 0;
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
  } else if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    int oh, om;
    if (!read_int(s, pos + 1, 2, oh) || pos + 3 >= s.size() ||
        s[pos + 3] != ':' || !read_int(s, pos + 4, 2, om) || oh > 23 ||
        om > 59) {
      return std::nullopt;
    }
    offset_minutes = (oh * 60 + om) * (s[pos] == '-' ? -1 : 1);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  Instant local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
  return local - minutes{offset_minutes};
}

std::string format_rfc3339(Instant t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss tod{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

Month month_of(Instant t) {
  year_month_day ymd{floor<days>(t)};
  return ymd.year() / ymd.month();
}

Instant month_start(Month m) { return sys_days{m / day{1}}; }

Instant month_end(Month m) { return month_start(m + months{1}) - seconds{1}; }

std::string format_month(Month m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(m.year()),
                static_cast<unsigned>(m.month()));
  return buf;
}

std::optional<Month> parse_month(std::string_view s) {
  int y, mo;
  if (s.size() != 7 || s[4] != '-' || !read_int(s, 0, 4, y) ||
      !read_int(s, 5, 2, mo) || mo < 1 || mo > 12) {
    return std::nullopt;
  }
  return year{y} / month{static_cast<unsigned>(mo)};
}

Instant add_months(Instant t, int n) {
  auto day_point = floor<days>(t);
  auto time_of_day = t - day_point;
  year_month_day ymd{day_point};
  Month target = (ymd.year() / ymd.month()) + months{n};
  auto last = year_month_day_last{target.year(), month_day_last{target.month()}};
  day d = ymd.day() > last.day() ? last.day() : ymd.day();
  return sys_days{target / d} + time_of_day;
}

Instant now_utc() { return floor<seconds>(system_clock::now()); }

}  // namespace cpulse
