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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptfuzz/corpus/tokenizer.hpp"

namespace adaptfuzz::corpus {

enum class Provenance { kSeed, kGenerated, kTransformed };

std::string_view to_string(Provenance p);
/// Throws Error(kMalformedInput) on unknown names.
Provenance provenance_from_string(std::string_view name);

/// A program flowing through the fuzzing loop. Immutable once built; `text`
/// is always the detokenized form of `tokens`.
class TestProgram {
 public:
  /// Canonicalizes `tokens` through one detokenize/tokenize round so the
  /// stored sequence is a fixed point of the round trip. Throws
  /// Error(kInvalidArgument) if the result is empty or the provenance fields
  /// are inconsistent (seeds have iteration 0 and no parent, others have a
  /// parent).
  static TestProgram make(std::string id, std::vector<Token> tokens,
                          Provenance provenance, int origin_iteration,
                          std::optional<std::string> parent_id);

  static TestProgram from_text(std::string id, std::string_view text,
                               Provenance provenance, int origin_iteration,
                               std::optional<std::string> parent_id);

  const std::string& id() const { return id_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::string& text() const { return text_; }
  Provenance provenance() const { return provenance_; }
  int origin_iteration() const { return origin_iteration_; }
  const std::optional<std::string>& parent_id() const { return parent_id_; }

  /// sha256 of text(); computed once.
  const std::string& content_hash() const { return content_hash_; }

 private:
  TestProgram() = default;

  std::string id_;
  std::vector<Token> tokens_;
  std::string text_;
  Provenance provenance_ = Provenance::kSeed;
  int origin_iteration_ = 0;
  std::optional<std::string> parent_id_;
  std::string content_hash_;
};

using ProgramPtr = std::shared_ptr<const TestProgram>;

/// Stable seed identifier derived from the program text.
std::string seed_id_for(std::string_view text);

}  // namespace adaptfuzz::corpus
