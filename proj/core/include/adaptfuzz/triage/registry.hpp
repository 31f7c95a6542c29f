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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adaptfuzz/triage/bug_key.hpp"

namespace adaptfuzz::triage {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// `2026-01-02T03:04:05.678Z`
std::string to_iso8601(Timestamp t);

struct CrashRecord {
  std::string program_id;
  std::string pass_flag;
  BugKey bug_key;
  std::string stderr_text;
  std::string program_text;
  Timestamp first_seen{};
  int iteration = 0;
};

enum class RegisterResult { kNewBug, kKnownBug, kDuplicateOccurrence };

/// Global bug table. Buckets keep the order in which bugs were first seen;
/// bug ids are 1-based positions in that order. Not internally
/// synchronized: one writer at a time.
class BugRegistry {
 public:
  struct Bucket {
    std::size_t bug_id;
    BugKey key;
    std::vector<CrashRecord> records;
  };

  /// Returns kNewBug iff the bucket for rec.bug_key was empty.
  /// (program_id, pass_flag) pairs already present are ignored and reported
  /// as kDuplicateOccurrence. Throws Error(kInvalidArgument) if stderr is
  /// empty.
  RegisterResult register_crash(CrashRecord rec);

  std::size_t bug_count() const { return buckets_.size(); }
  std::size_t record_count() const { return occurrences_.size(); }
  const std::vector<Bucket>& buckets() const { return buckets_; }
  const Bucket* find(const BugKey& key) const;
  std::set<BugKey> keys() const;

  /// Every record, in registration order, one JSON object per line.
  std::string to_jsonl() const;
  /// Replays a to_jsonl() snapshot. Throws Error(kMalformedInput).
  static BugRegistry from_jsonl(std::string_view text);

 private:
  std::vector<Bucket> buckets_;
  std::map<BugKey, std::size_t> index_;
  std::set<std::pair<std::string, std::string>> occurrences_;
  std::vector<std::pair<std::size_t, std::size_t>> order_;  // (bucket, record)
};

/// Writes `bugs.jsonl` and one `bug_<id>/` directory per bug holding the
/// first occurrence: reproducer.mlir, pass.txt, stderr.txt, key.txt and
/// meta.json. Byte-identical on re-export. Throws Error(kIoFailure).
void export_registry(const BugRegistry& registry, const std::filesystem::path& dir);

/// One line of bugs.jsonl, as read back by the report tooling.
struct BugIndexEntry {
  std::size_t bug_id = 0;
  BugKey key;
  std::size_t occurrences = 0;
  std::string first_seen_iso8601;
  std::string reproducer_path;
  std::string pass_flag;
};

/// Throws Error(kMalformedInput) naming `path` on any bad line.
std::vector<BugIndexEntry> load_bug_index(const std::filesystem::path& path);

}  // namespace adaptfuzz::triage
