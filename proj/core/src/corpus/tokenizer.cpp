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

#include "adaptfuzz/corpus/tokenizer.hpp"

namespace adaptfuzz::corpus {

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_hex_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_ident_char(char c) {
  return is_ident_start(c) || is_digit(c) || c == '$' || c == '.';
}

bool is_sigil(char c) {
  return c == '%' || c == '@' || c == '#' || c == '!' || c == '^';
}

bool is_trivia(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
}

// Each scan_* returns the end offset of the token starting at `i`.

std::size_t scan_ident(std::string_view s, std::size_t i) {
  ++i;
  while (i < s.size() && is_ident_char(s[i])) ++i;
  return i;
}

std::size_t scan_number(std::string_view s, std::size_t i) {
  if (s[i] == '0' && i + 2 < s.size() &&
      (s[i + 1] == 'x' || s[i + 1] == 'X') && is_hex_digit(s[i + 2])) {
    i += 2;
    while (i < s.size() && is_hex_digit(s[i])) ++i;
    return i;
  }
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i;
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    if (j < s.size() && is_digit(s[j])) {
      while (j < s.size() && is_digit(s[j])) ++j;
      i = j;
    }
  }
  return i;
}

// A string without a closing quote on its line degrades to a lone '"' token,
// which keeps re-lexing of the detokenized form stable.
std::size_t scan_string(std::string_view s, std::size_t i) {
  std::size_t j = i + 1;
  while (j < s.size() && s[j] != '\n') {
    if (s[j] == '\\' && j + 1 < s.size() && s[j + 1] != '\n') {
      j += 2;
      continue;
    }
    if (s[j] == '"') return j + 1;
    ++j;
  }
  return i + 1;
}

std::size_t scan_sigil(std::string_view s, std::size_t i) {
  std::size_t j = i + 1;
  while (j < s.size() && is_ident_char(s[j])) ++j;
  // A bare sigil is plain punctuation.
  return j;
}

}  // namespace

std::vector<LexedToken> lex(std::string_view s) {
  std::vector<LexedToken> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      out.push_back({s.substr(i, 1), i});
      ++i;
      continue;
    }
    if (is_trivia(c)) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    std::size_t end;
    if (is_ident_start(c)) {
      end = scan_ident(s, i);
    } else if (is_digit(c)) {
      end = scan_number(s, i);
    } else if (c == '"') {
      end = scan_string(s, i);
    } else if (is_sigil(c)) {
      end = scan_sigil(s, i);
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      end = i + 2;
    } else {
      end = i + 1;
    }
    out.push_back({s.substr(i, end - i), i});
    i = end;
  }
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  for (const auto& t : lex(text)) out.emplace_back(t.text);
  return out;
}

std::string detokenize(std::span<const Token> tokens) {
  std::string out;
  bool at_line_start = true;
  for (const auto& t : tokens) {
    if (is_newline(t)) {
      out.push_back('\n');
      at_line_start = true;
      continue;
    }
    if (!at_line_start) out.push_back(' ');
    out += t;
    at_line_start = false;
  }
  return out;
}

}  // namespace adaptfuzz::corpus
