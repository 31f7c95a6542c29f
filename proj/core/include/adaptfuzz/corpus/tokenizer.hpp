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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adaptfuzz::corpus {

/// One lexical unit of IR text. Never contains '\n' unless it is exactly the
/// newline token.
using Token = std::string;

inline constexpr std::string_view kNewlineToken = "\n";

inline bool is_newline(std::string_view token) {
  return token == kNewlineToken;
}

struct LexedToken {
  std::string_view text;  // view into the lexed source
  std::size_t offset;
};

/// Lexical IR tokenizer.
///
///   - dotted identifiers (`func.func`, `arith.constant`) are one token
///   - sigil names (`%x`, `@f`, `#map`, `!llvm.ptr`, `^bb0`) are one token
///   - numeric and string literals are one token; strings keep escapes
///   - `->` is one token, every other punctuation byte is its own token
///   - one newline token per line break
///   - whitespace and `//` line comments are trivia and produce nothing
///
/// Any byte sequence lexes; unknown bytes become single-byte tokens.
std::vector<LexedToken> lex(std::string_view text);

std::vector<Token> tokenize(std::string_view text);

/// Joins tokens with single spaces; newline tokens become bare line breaks.
/// tokenize(detokenize(tokenize(s))) == tokenize(s) for every s.
std::string detokenize(std::span<const Token> tokens);

}  // namespace adaptfuzz::corpus
