// Copyright 2026 The adaptfuzz Authors.
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

namespace adaptfuzz::harness {

enum class OutcomeKind { kValid, kDiagnostic, kCrash, kTimeout };

std::string_view to_string(OutcomeKind kind);

struct ExecutionOutcome {
  OutcomeKind kind = OutcomeKind::kDiagnostic;
  std::optional<int> exit_code;
  std::optional<int> signal;
  std::string stdout_text;
  std::string stderr_text;
  std::chrono::microseconds wall_time{0};
};

/// True if stderr carries any crash marker: `PLEASE submit a bug report`,
/// `Stack dump:`, or an assertion-failure line.
bool has_crash_marker(std::string_view stderr_text);

/// Total classification. A timeout wins over everything, then a signal or
/// crash marker makes a crash, then exit status 0 is valid and anything else
/// is an ordinary diagnostic rejection.
OutcomeKind classify(std::optional<int> exit_code, std::optional<int> signal,
                     std::string_view stderr_text, bool timed_out);

}  // namespace adaptfuzz::harness
