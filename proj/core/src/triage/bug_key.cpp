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

#include "adaptfuzz/triage/bug_key.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <regex>

#include "adaptfuzz/error.hpp"

namespace adaptfuzz::triage {

std::string_view to_string(KeyKind kind) {
  return kind == KeyKind::kAssertion ? "assertion" : "trace";
}

KeyKind key_kind_from_string(std::string_view name) {
  if (name == "assertion") return KeyKind::kAssertion;
  if (name == "trace") return KeyKind::kTrace;
  throw Error(ErrorCode::kMalformedInput,
              "unknown key kind '" + std::string(name) + "'");
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::optional<std::string> match_assertion(const std::string& line) {
  static const std::regex kPatterns[] = {
      std::regex(R"(Assertion [`'](.*)' failed)"),
      std::regex(R"(Assertion failed: \((.*)\), function)"),
      std::regex(R"(Assertion failed: (.*?)(, file .*)?$)"),
      std::regex(R"((?:^|[^A-Za-z0-9_])assert\((.*)\))"),
  };
  std::smatch m;
  for (const auto& re : kPatterns) {
    if (std::regex_search(line, m, re)) {
      auto expr = normalize_assertion(m[1].str());
      if (!expr.empty()) return expr;
    }
  }
  return std::nullopt;
}

std::optional<std::string> frame_symbol(const std::string& line) {
  static const std::regex kFrame(R"(^\s*#\d+\s+(.*)$)");
  static const std::regex kAddress(R"(^0x[0-9A-Fa-f]+\s*)");
  static const std::regex kModuleOffset(R"(\s*\([^()]*\+0x[0-9A-Fa-f]+\)\s*$)");
  static const std::regex kLocation(R"(\s+at\s+\S+\s*$)");
  static const std::regex kOffset(R"(\s*\+\s*(0x[0-9A-Fa-f]+|\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(line, m, kFrame)) return std::nullopt;
  std::string sym = m[1].str();
  sym = std::regex_replace(sym, kAddress, "");
  if (sym.rfind("in ", 0) == 0) sym.erase(0, 3);
  sym = std::regex_replace(sym, kModuleOffset, "");
  sym = std::regex_replace(sym, kLocation, "");
  sym = std::regex_replace(sym, kOffset, "");
  return collapse_whitespace(sym);
}

}  // namespace

std::string normalize_assertion(std::string_view expr) {
  static const std::regex kSourceLoc(
      R"([A-Za-z0-9_./\\-]*\.(cpp|cc|cxx|c|h|hpp|hh|inc|td)(:\d+)+)");
  static const std::regex kLineWord(R"(,?\s*line \d+)");
  std::string s(expr);
  s = std::regex_replace(s, kSourceLoc, "");
  s = std::regex_replace(s, kLineWord, "");
  return collapse_whitespace(s);
}

std::optional<BugKey> extract_bug_key(std::string_view stderr_text,
                                      const std::vector<std::string>& frame_prefixes) {
  const auto lines = split_lines(stderr_text);
  for (auto line : lines) {
    if (auto expr = match_assertion(std::string(line))) {
      return BugKey{KeyKind::kAssertion, std::move(*expr), false};
    }
  }
  std::string frames;
  for (auto line : lines) {
    auto sym = frame_symbol(std::string(line));
    if (!sym) continue;
    const bool relevant = std::any_of(
        frame_prefixes.begin(), frame_prefixes.end(),
        [&](const std::string& p) { return sym->rfind(p, 0) == 0; });
    if (!relevant) continue;
    if (!frames.empty()) frames.push_back('\n');
    frames += *sym;
  }
  if (frames.empty()) return std::nullopt;
  return BugKey{KeyKind::kTrace, std::move(frames), false};
}

BugKey catch_all_key(std::string_view stderr_text) {
  static const std::regex kHex(R"(0x[0-9A-Fa-f]+)");
  std::deque<std::string> tail;
  for (auto line : split_lines(stderr_text)) {
    auto cleaned = collapse_whitespace(std::regex_replace(std::string(line), kHex, "0x?"));
    if (cleaned.empty()) continue;
    tail.push_back(std::move(cleaned));
    if (tail.size() > 5) tail.pop_front();
  }
  std::string value;
  for (const auto& l : tail) {
    if (!value.empty()) value.push_back('\n');
    value += l;
  }
  return BugKey{KeyKind::kTrace, std::move(value), true};
}

BugKey bug_key_for(std::string_view stderr_text,
                   const std::vector<std::string>& frame_prefixes) {
  if (auto key = extract_bug_key(stderr_text, frame_prefixes)) return *key;
  return catch_all_key(stderr_text);
}

}  // namespace adaptfuzz::triage
