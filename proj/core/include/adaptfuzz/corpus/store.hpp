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
#include <cstdint>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "adaptfuzz/corpus/program.hpp"

namespace adaptfuzz::corpus {

/// Append-only program store keyed by id and deduplicated on content hash.
/// Single writer, many readers; entries are immutable and shareable.
class CorpusStore {
 public:
  CorpusStore() = default;
  CorpusStore(const CorpusStore& other);
  CorpusStore& operator=(const CorpusStore& other);

  /// Inserts `program` unless its text is already stored. Returns whether it
  /// was inserted. A fresh text reusing an existing id is an
  /// Error(kInvalidArgument).
  bool add(TestProgram program);

  std::size_t size() const;
  bool empty() const { return size() == 0; }

  /// Entries in insertion order.
  std::vector<ProgramPtr> entries() const;

  ProgramPtr find(std::string_view id) const;
  bool contains_hash(const std::string& content_hash) const;

 private:
  mutable std::shared_mutex mu_;
  std::vector<ProgramPtr> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_set<std::string> content_index_;
};

inline bool add_program(CorpusStore& store, TestProgram program) {
  return store.add(std::move(program));
}

/// min(|store|, max_count) distinct entries drawn uniformly without
/// replacement. Throws Error(kEmptyCorpus) on an empty store and
/// Error(kInvalidArgument) when max_count is zero.
std::vector<ProgramPtr> sample_fuzz_seeds(const CorpusStore& store,
                                          std::size_t max_count,
                                          std::uint64_t rng_seed);

struct CorpusStats {
  std::size_t file_count = 0;
  double mean_tokens = 0.0;

  /// Mean rounded for two-decimal reporting.
  double mean_tokens_rounded() const;
};

CorpusStats corpus_stats(const CorpusStore& store);

}  // namespace adaptfuzz::corpus
