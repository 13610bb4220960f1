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

#include "core/errors.hpp"

namespace cpulse {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Io: return "io_error";
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::Auth: return "auth_error";
    case ErrorCode::RateLimited: return "rate_limited";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::IllegalTransition: return "illegal_transition";
    case ErrorCode::InvalidSnooze: return "invalid_snooze";
    case ErrorCode::InvalidRange: return "invalid_range";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error(ErrorCode::Parse,
            line == 0 ? reason : "line " + std::to_string(line) + ": " + reason),
      line_(line),
      reason_(reason) {}

}  // namespace cpulse
