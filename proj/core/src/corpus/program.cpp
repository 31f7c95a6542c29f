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

#include "adaptfuzz/corpus/program.hpp"

#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"

namespace adaptfuzz::corpus {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kSeed: return "seed";
    case Provenance::kGenerated: return "generated";
    case Provenance::kTransformed: return "transformed";
  }
  return "seed";
}

Provenance provenance_from_string(std::string_view name) {
  if (name == "seed") return Provenance::kSeed;
  if (name == "generated") return Provenance::kGenerated;
  if (name == "transformed") return Provenance::kTransformed;
  throw Error(ErrorCode::kMalformedInput,
              "unknown provenance '" + std::string(name) + "'");
}

TestProgram TestProgram::make(std::string id, std::vector<Token> tokens,
                              Provenance provenance, int origin_iteration,
                              std::optional<std::string> parent_id) {
  if (id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "program id must be non-empty");
  }
  const bool seed_shape = origin_iteration == 0 && !parent_id.has_value();
  if ((provenance == Provenance::kSeed) != seed_shape || origin_iteration < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "inconsistent provenance for program " + id);
  }
  TestProgram p;
  p.text_ = detokenize(tokens);
  p.tokens_ = tokenize(p.text_);
  // Canonical tokens detokenize to the same text, so text_ stays valid.
  if (p.tokens_ != tokens) p.text_ = detokenize(p.tokens_);
  if (p.tokens_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "program " + id + " is empty");
  }
  p.id_ = std::move(id);
  p.provenance_ = provenance;
  p.origin_iteration_ = origin_iteration;
  p.parent_id_ = std::move(parent_id);
  p.content_hash_ = sha256_hex(p.text_);
  return p;
}

TestProgram TestProgram::from_text(std::string id, std::string_view text,
                                   Provenance provenance, int origin_iteration,
                                   std::optional<std::string> parent_id) {
  return make(std::move(id), tokenize(text), provenance, origin_iteration,
              std::move(parent_id));
}

std::string seed_id_for(std::string_view text) {
  return "s-" + sha256_hex(text).substr(0, 16);
}

}  // namespace adaptfuzz::corpus
