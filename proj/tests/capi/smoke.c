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

#include <stdio.h>
#include <string.h>

#include <community_pulse/community_pulse.h>

int main(void) {
  cp_options options;
  int64_t t = 0;
  cp_store* store = NULL;

  cp_options_init(&options);
  if (options.window_months != 6 || options.rising_threshold != 3) return 1;
  if (cp_parse_time("2021-01-01T00:00:00Z", &t) != CP_OK || t != 1609459200) return 2;
  if (cp_parse_time("yesterday", &t) != CP_ERR_INVALID_ARGUMENT) return 3;
  if (strlen(cp_last_error()) == 0) return 4;
  if (cp_store_open(NULL, "not a repo", &store) == CP_OK) return 5;
  if (strcmp(cp_status_name(CP_ERR_ILLEGAL_TRANSITION), "illegal_transition") != 0) return 6;
  printf("community-pulse %s\n", cp_version());
  return 0;
}
