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

#include "adaptfuzz/triage/registry.hpp"

#include <cstdio>
#include <ctime>
#include <nlohmann/json.hpp>
#include <sstream>

#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"

namespace adaptfuzz::triage {

using nlohmann::json;

std::string to_iso8601(Timestamp t) {
  const auto ms = t.time_since_epoch().count();
  auto secs = static_cast<std::time_t>(ms / 1000);
  auto frac = ms % 1000;
  if (frac < 0) {
    frac += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(frac));
  return buf;
}

RegisterResult BugRegistry::register_crash(CrashRecord rec) {
  if (rec.stderr_text.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "crash record for " + rec.program_id + " has empty stderr");
  }
  if (!occurrences_.emplace(rec.program_id, rec.pass_flag).second) {
    return RegisterResult::kDuplicateOccurrence;
  }
  auto [it, fresh] = index_.emplace(rec.bug_key, buckets_.size());
  if (fresh) buckets_.push_back(Bucket{buckets_.size() + 1, rec.bug_key, {}});
  auto& bucket = buckets_[it->second];
  order_.emplace_back(it->second, bucket.records.size());
  bucket.records.push_back(std::move(rec));
  return fresh ? RegisterResult::kNewBug : RegisterResult::kKnownBug;
}

const BugRegistry::Bucket* BugRegistry::find(const BugKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &buckets_[it->second];
}

std::set<BugKey> BugRegistry::keys() const {
  std::set<BugKey> out;
  for (const auto& b : buckets_) out.insert(b.key);
  return out;
}

std::string BugRegistry::to_jsonl() const {
  std::string out;
  for (const auto& [b, r] : order_) {
    const auto& rec = buckets_[b].records[r];
    json j{{"key_kind", to_string(rec.bug_key.kind)},
           {"key_value", rec.bug_key.value},
           {"low_confidence", rec.bug_key.low_confidence},
           {"program_id", rec.program_id},
           {"pass_flag", rec.pass_flag},
           {"iteration", rec.iteration},
           {"first_seen_ms", rec.first_seen.time_since_epoch().count()},
           {"stderr", rec.stderr_text},
           {"program_text", rec.program_text}};
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

BugRegistry BugRegistry::from_jsonl(std::string_view text) {
  BugRegistry reg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      CrashRecord rec;
      rec.bug_key.kind = key_kind_from_string(j.at("key_kind").get<std::string>());
      rec.bug_key.value = j.at("key_value").get<std::string>();
      rec.bug_key.low_confidence = j.at("low_confidence").get<bool>();
      rec.program_id = j.at("program_id").get<std::string>();
      rec.pass_flag = j.at("pass_flag").get<std::string>();
      rec.iteration = j.at("iteration").get<int>();
      rec.first_seen = Timestamp(std::chrono::milliseconds(
          j.at("first_seen_ms").get<std::int64_t>()));
      rec.stderr_text = j.at("stderr").get<std::string>();
      rec.program_text = j.at("program_text").get<std::string>();
      if (reg.register_crash(std::move(rec)) == RegisterResult::kDuplicateOccurrence) {
        throw Error(ErrorCode::kMalformedInput, "duplicate occurrence");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedInput,
                  "registry line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedInput,
                  "registry line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return reg;
}

namespace {

std::string bug_dir_name(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "bug_%04zu", id);
  return buf;
}

}  // namespace

void export_registry(const BugRegistry& registry, const std::filesystem::path& dir) {
  std::string index;
  for (const auto& bucket : registry.buckets()) {
    const auto& first = bucket.records.front();
    const auto name = bug_dir_name(bucket.bug_id);
    const auto sub = dir / name;
    write_file_atomic(sub / "reproducer.mlir", first.program_text);
    write_file_atomic(sub / "pass.txt", first.pass_flag + "\n");
    write_file_atomic(sub / "stderr.txt", first.stderr_text);
    write_file_atomic(sub / "key.txt", bucket.key.value + "\n");
    json meta{{"bug_id", bucket.bug_id},
              {"key_kind", to_string(bucket.key.kind)},
              {"low_confidence", bucket.key.low_confidence},
              {"program_id", first.program_id},
              {"pass_flag", first.pass_flag},
              {"first_seen_iteration", first.iteration},
              {"first_seen_iso8601", to_iso8601(first.first_seen)},
              {"occurrences", bucket.records.size()}};
    write_file_atomic(sub / "meta.json", meta.dump(2) + "\n");

    json line{{"bug_id", bucket.bug_id},
              {"key_kind", to_string(bucket.key.kind)},
              {"key_value", bucket.key.value},
              {"occurrences", bucket.records.size()},
              {"first_seen_iso8601", to_iso8601(first.first_seen)},
              {"reproducer_path", name + "/reproducer.mlir"},
              {"pass_flag", first.pass_flag},
              {"low_confidence", bucket.key.low_confidence}};
    index += line.dump();
    index.push_back('\n');
  }
  write_file_atomic(dir / "bugs.jsonl", index);
}

std::vector<BugIndexEntry> load_bug_index(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<BugIndexEntry> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      BugIndexEntry e;
      e.bug_id = j.at("bug_id").get<std::size_t>();
      e.key.kind = key_kind_from_string(j.at("key_kind").get<std::string>());
      e.key.value = j.at("key_value").get<std::string>();
      e.key.low_confidence = j.value("low_confidence", false);
      e.occurrences = j.at("occurrences").get<std::size_t>();
      e.first_seen_iso8601 = j.at("first_seen_iso8601").get<std::string>();
      e.reproducer_path = j.at("reproducer_path").get<std::string>();
      e.pass_flag = j.at("pass_flag").get<std::string>();
      out.push_back(std::move(e));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kMalformedInput,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace adaptfuzz::triage
