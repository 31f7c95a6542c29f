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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaptfuzz::triage {

enum class KeyKind { kAssertion, kTrace };

std::string_view to_string(KeyKind kind);
/// Throws Error(kMalformedInput).
KeyKind key_kind_from_string(std::string_view name);

struct BugKey {
  KeyKind kind = KeyKind::kTrace;
  std::string value;
  /// Set on catch-all keys built from raw stderr tail lines.
  bool low_confidence = false;

  auto operator<=>(const BugKey&) const = default;
};

inline const std::vector<std::string>& default_frame_prefixes() {
  static const std::vector<std::string> kPrefixes{"mlir::"};
  return kPrefixes;
}

/// Collapses whitespace runs to one space, trims, and removes source
/// locations such as `Foo.cpp:123` or `, line 42`.
std::string normalize_assertion(std::string_view expr);

/// Assertion key if any line carries an assertion (first one wins);
/// otherwise a trace key of the `#N` frames whose symbol starts with one of
/// `frame_prefixes`, addresses and offsets stripped. nullopt when stderr has
/// neither (no signal to key on).
std::optional<BugKey> extract_bug_key(
    std::string_view stderr_text,
    const std::vector<std::string>& frame_prefixes = default_frame_prefixes());

/// Fallback key: the last five non-empty stderr lines with hex addresses
/// masked, flagged low-confidence.
BugKey catch_all_key(std::string_view stderr_text);

/// extract_bug_key, falling back to catch_all_key.
BugKey bug_key_for(std::string_view stderr_text,
                   const std::vector<std::string>& frame_prefixes =
                       default_frame_prefixes());

}  // namespace adaptfuzz::triage
