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

#include "adaptfuzz/corpus/store.hpp"

namespace adaptfuzz::corpus {

// On-disk corpus:
//
//   <dir>/seed/<id>.mlir
//   <dir>/generated/<id>.mlir
//   <dir>/transformed/<id>.mlir
//   <dir>/manifest.jsonl   one object per entry, insertion order:
//     {"id", "provenance", "origin_iteration", "parent_id", "token_count",
//      "sha256"}
//
// The manifest is append-only: persisting a store that extends an already
// persisted one only appends the new entries.

inline constexpr const char* kManifestFile = "manifest.jsonl";

/// Returns the number of entries appended. Throws Error(kMalformedInput) if
/// the existing manifest is not a prefix of `store`, Error(kIoFailure) on
/// filesystem errors.
std::size_t save_corpus(const CorpusStore& store,
                        const std::filesystem::path& dir);

/// Throws Error(kMalformedInput) when an entry's file is missing or its hash
/// or token count disagrees with the manifest.
CorpusStore load_corpus(const std::filesystem::path& dir);

/// Self-contained JSON-lines snapshot (manifest fields plus "text"), used for
/// checkpoints.
std::string serialize_snapshot(const CorpusStore& store);
CorpusStore parse_snapshot(const std::string& snapshot);

}  // namespace adaptfuzz::corpus
