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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptfuzz/corpus/program.hpp"

namespace adaptfuzz::corpus {

struct SeedUnit {
  TestProgram program;
  /// From the unit's leading keyword to the end of its closing line.
  std::string body;
  /// `body` plus everything between the previous unit and this one (comments,
  /// RUN lines, blank lines). Concatenating every `source` reproduces the
  /// file up to the first unbalanced unit.
  std::string source;
};

/// A unit whose braces never re-balanced; it and everything after it is
/// dropped from the split.
struct UnbalancedDelimiters {
  std::size_t line = 0;  // 1-based line of the unit's leading keyword
  std::string skipped_text;
};

struct SplitResult {
  std::vector<SeedUnit> units;
  /// Text not covered by any unit's `source`: the whole file when it holds no
  /// unit, or the unbalanced remainder.
  std::string trailer;
  std::optional<UnbalancedDelimiters> unbalanced;

  std::vector<TestProgram> programs() const;
};

/// True for tokens that open a top-level unit: `module`, `func`, and any
/// dialect-qualified `*.module` / `*.func`.
bool is_unit_keyword(std::string_view token);

/// Splits a seed file into one program per top-level function or module. A
/// unit ends at the first line break where brace and paren depth are both
/// back to zero (a braceless declaration ends on its own line).
SplitResult split_seed_file(std::string_view file_text);

}  // namespace adaptfuzz::corpus
