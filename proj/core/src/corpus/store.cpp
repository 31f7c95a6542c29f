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

#include "adaptfuzz/corpus/store.hpp"

#include <cmath>
#include <mutex>
#include <numeric>

#include "adaptfuzz/error.hpp"
#include "adaptfuzz/rng.hpp"

namespace adaptfuzz::corpus {

CorpusStore::CorpusStore(const CorpusStore& other) {
  std::shared_lock lock(other.mu_);
  entries_ = other.entries_;
  by_id_ = other.by_id_;
  content_index_ = other.content_index_;
}

CorpusStore& CorpusStore::operator=(const CorpusStore& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_);
  std::shared_lock other_lock(other.mu_);
  entries_ = other.entries_;
  by_id_ = other.by_id_;
  content_index_ = other.content_index_;
  return *this;
}

bool CorpusStore::add(TestProgram program) {
  std::unique_lock lock(mu_);
  if (content_index_.contains(program.content_hash())) return false;
  if (by_id_.contains(program.id())) {
    throw Error(ErrorCode::kInvalidArgument,
                "program id " + program.id() + " reused for different text");
  }
  content_index_.insert(program.content_hash());
  by_id_.emplace(program.id(), entries_.size());
  entries_.push_back(std::make_shared<const TestProgram>(std::move(program)));
  return true;
}

std::size_t CorpusStore::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::vector<ProgramPtr> CorpusStore::entries() const {
  std::shared_lock lock(mu_);
  return entries_;
}

ProgramPtr CorpusStore::find(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : entries_[it->second];
}

bool CorpusStore::contains_hash(const std::string& content_hash) const {
  std::shared_lock lock(mu_);
  return content_index_.contains(content_hash);
}

std::vector<ProgramPtr> sample_fuzz_seeds(const CorpusStore& store,
                                          std::size_t max_count,
                                          std::uint64_t rng_seed) {
  if (max_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  }
  auto all = store.entries();
  if (all.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot sample from an empty corpus");
  }
  const std::size_t k = std::min(all.size(), max_count);
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  Rng rng(rng_seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(all.size() - i);
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  return all;
}

double CorpusStats::mean_tokens_rounded() const {
  return std::round(mean_tokens * 100.0) / 100.0;
}

CorpusStats corpus_stats(const CorpusStore& store) {
  CorpusStats stats;
  const auto entries = store.entries();
  stats.file_count = entries.size();
  if (entries.empty()) return stats;
  const double total = std::accumulate(
      entries.begin(), entries.end(), 0.0,
      [](double acc, const ProgramPtr& p) {
        return acc + static_cast<double>(p->tokens().size());
      });
  stats.mean_tokens = total / static_cast<double>(entries.size());
  return stats;
}

}  // namespace adaptfuzz::corpus
