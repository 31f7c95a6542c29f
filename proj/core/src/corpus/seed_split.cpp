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

#include "adaptfuzz/corpus/seed_split.hpp"

#include <algorithm>

namespace adaptfuzz::corpus {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

bool is_unit_keyword(std::string_view token) {
  return token == "module" || token == "func" || ends_with(token, ".module") ||
         ends_with(token, ".func");
}

std::vector<TestProgram> SplitResult::programs() const {
  std::vector<TestProgram> out;
  out.reserve(units.size());
  for (const auto& u : units) out.push_back(u.program);
  return out;
}

SplitResult split_seed_file(std::string_view text) {
  SplitResult result;
  const auto toks = lex(text);
  std::size_t consumed = 0;  // end of the previous unit's source
  bool line_start = true;

  std::size_t i = 0;
  while (i < toks.size()) {
    const auto& tok = toks[i];
    if (is_newline(tok.text)) {
      line_start = true;
      ++i;
      continue;
    }
    if (!line_start || !is_unit_keyword(tok.text)) {
      line_start = false;
      ++i;
      continue;
    }

    const std::size_t begin = i;
    int braces = 0;
    int parens = 0;
    std::size_t j = i;
    bool closed = false;
    for (; j < toks.size(); ++j) {
      const auto t = toks[j].text;
      if (t == "{") ++braces;
      else if (t == "}") --braces;
      else if (t == "(") ++parens;
      else if (t == ")") --parens;
      else if (is_newline(t) && braces <= 0 && parens <= 0) {
        closed = true;
        break;
      }
    }
    if (!closed && braces <= 0 && parens <= 0) closed = true;  // EOF line

    if (!closed) {
      const auto line = static_cast<std::size_t>(
          std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(
                                                      tok.offset), '\n'));
      result.unbalanced = UnbalancedDelimiters{
          line + 1, std::string(text.substr(tok.offset))};
      result.trailer = std::string(text.substr(consumed));
      return result;
    }

    const std::size_t body_end = j < toks.size() ? toks[j].offset : text.size();
    const std::size_t source_end =
        j < toks.size() ? toks[j].offset + 1 : text.size();

    std::vector<Token> unit_tokens;
    unit_tokens.reserve(j - begin);
    for (std::size_t k = begin; k < j; ++k) {
      unit_tokens.emplace_back(toks[k].text);
    }
    const auto id = seed_id_for(detokenize(unit_tokens));
    result.units.push_back(SeedUnit{
        TestProgram::make(id, std::move(unit_tokens), Provenance::kSeed, 0,
                          std::nullopt),
        std::string(text.substr(tok.offset, body_end - tok.offset)),
        std::string(text.substr(consumed, source_end - consumed))});
    consumed = source_end;
    line_start = true;
    i = j + 1;
  }

  if (result.units.empty()) {
    result.trailer = std::string(text);
  } else {
    result.units.back().source += text.substr(consumed);
  }
  return result;
}

}  // namespace adaptfuzz::corpus
