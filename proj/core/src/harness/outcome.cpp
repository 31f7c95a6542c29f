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

#include "adaptfuzz/harness/outcome.hpp"

#include <regex>

namespace adaptfuzz::harness {

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kValid: return "valid";
    case OutcomeKind::kDiagnostic: return "diagnostic";
    case OutcomeKind::kCrash: return "crash";
    case OutcomeKind::kTimeout: return "timeout";
  }
  return "diagnostic";
}

bool has_crash_marker(std::string_view stderr_text) {
  if (stderr_text.find("PLEASE submit a bug report") != std::string_view::npos ||
      stderr_text.find("Stack dump:") != std::string_view::npos ||
      stderr_text.find("Assertion failed:") != std::string_view::npos) {
    return true;
  }
  static const std::regex kAssertLine(R"(Assertion [`'].*' failed)");
  return std::regex_search(stderr_text.begin(), stderr_text.end(), kAssertLine);
}

OutcomeKind classify(std::optional<int> exit_code, std::optional<int> signal,
                     std::string_view stderr_text, bool timed_out) {
  if (timed_out) return OutcomeKind::kTimeout;
  if (signal.has_value() || has_crash_marker(stderr_text)) {
    return OutcomeKind::kCrash;
  }
  if (exit_code == 0) return OutcomeKind::kValid;
  return OutcomeKind::kDiagnostic;
}

}  // namespace adaptfuzz::harness
