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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace adaptfuzz::harness {

enum class PassCategory {
  kConversion,
  kGeneralTransformation,
  kDialectTransformation,
  kBufferization,
  kOther,
};

std::string_view to_string(PassCategory category);

struct PassSpec {
  std::string flag;  // non-empty, starts with '-'
  PassCategory category = PassCategory::kOther;

  bool operator==(const PassSpec&) const = default;
};

/// One pass per line, `<flag> [category]`, `#` starts a comment. Throws
/// Error(kMalformedLine) (message carries the line number) or
/// Error(kDuplicatePass).
std::vector<PassSpec> parse_pass_list(std::string_view contents);

std::vector<PassSpec> load_pass_list(const std::filesystem::path& path);

}  // namespace adaptfuzz::harness
