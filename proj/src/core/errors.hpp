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
#include <stdexcept>
#include <string>

namespace cpulse {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  Auth,
  RateLimited,
  NotFound,
  IllegalTransition,
  InvalidSnooze,
  InvalidRange,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed input record; line is 1-based, 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason);

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class RateLimitedError : public Error {
 public:
  RateLimitedError(long retry_after_seconds, const std::string& message)
      : Error(ErrorCode::RateLimited, message),
        retry_after_(retry_after_seconds) {}

  long retry_after_seconds() const noexcept { return retry_after_; }

 private:
  long retry_after_;
};

}  // namespace cpulse
