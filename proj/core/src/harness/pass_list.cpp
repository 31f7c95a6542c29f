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

#include "adaptfuzz/harness/pass_list.hpp"

#include <sstream>
#include <unordered_map>

#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"

namespace adaptfuzz::harness {

std::string_view to_string(PassCategory category) {
  switch (category) {
    case PassCategory::kConversion: return "Conversion";
    case PassCategory::kGeneralTransformation: return "GeneralTransformation";
    case PassCategory::kDialectTransformation: return "DialectTransformation";
    case PassCategory::kBufferization: return "Bufferization";
    case PassCategory::kOther: return "Other";
  }
  return "Other";
}

namespace {

bool parse_category(std::string_view name, PassCategory& out) {
  for (auto c : {PassCategory::kConversion, PassCategory::kGeneralTransformation,
                 PassCategory::kDialectTransformation,
                 PassCategory::kBufferization, PassCategory::kOther}) {
    if (to_string(c) == name) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<PassSpec> parse_pass_list(std::string_view contents) {
  std::vector<PassSpec> out;
  std::unordered_map<std::string, std::size_t> seen;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> words;
    for (std::string w; fields >> w;) words.push_back(w);
    if (words.empty()) continue;

    const auto where = "line " + std::to_string(lineno) + ": ";
    PassSpec spec;
    spec.flag = words[0];
    if (words.size() > 2 || spec.flag.size() < 2 || spec.flag[0] != '-') {
      throw Error(ErrorCode::kMalformedLine, where + "expected '<-flag> [category]'");
    }
    if (words.size() == 2 && !parse_category(words[1], spec.category)) {
      throw Error(ErrorCode::kMalformedLine,
                  where + "unknown category '" + words[1] + "'");
    }
    if (auto [it, fresh] = seen.emplace(spec.flag, lineno); !fresh) {
      throw Error(ErrorCode::kDuplicatePass,
                  where + spec.flag + " already listed on line " +
                      std::to_string(it->second));
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::vector<PassSpec> load_pass_list(const std::filesystem::path& path) {
  return parse_pass_list(read_file(path));
}

}  // namespace adaptfuzz::harness
