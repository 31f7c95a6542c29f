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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/triage/bug_key.hpp"
#include "adaptfuzz/triage/registry.hpp"
#include "stderr_corpus.hpp"
#include "test_support.hpp"

namespace adaptfuzz::triage {
namespace {

using testing::TempDir;

CrashRecord record(const std::string& program, const std::string& pass,
                   const std::string& stderr_text, int iteration = 1) {
  CrashRecord r;
  r.program_id = program;
  r.pass_flag = pass;
  r.bug_key = bug_key_for(stderr_text);
  r.stderr_text = stderr_text;
  r.program_text = "module { }";
  r.first_seen = Timestamp(std::chrono::milliseconds(1'700'000'000'000 + iteration));
  r.iteration = iteration;
  return r;
}

// --- keys ------------------------------------------------------------------

TEST(ExtractBugKey, AssertionIgnoresSourceLine) {
  const auto a = extract_bug_key(
      "mlir-opt: lib/A.cpp:120: void f(): Assertion 'm != nullptr' failed.\n");
  const auto b = extract_bug_key(
      "mlir-opt: lib/A.cpp:987: void f(): Assertion 'm != nullptr' failed.\n");
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
  EXPECT_EQ(a->kind, KeyKind::kAssertion);
  EXPECT_EQ(a->value, "m != nullptr");
}

TEST(ExtractBugKey, TraceKeepsOnlyPrefixedFrames) {
  const auto k = extract_bug_key(
      "#0 0x0000555555554000 mlir::foo\n"
      "#1 0x0000555555554100 llvm::bar\n"
      "#2 0x0000555555554200 mlir::baz\n");
  ASSERT_TRUE(k);
  EXPECT_EQ(k->kind, KeyKind::kTrace);
  EXPECT_EQ(k->value, "mlir::foo\nmlir::baz");
  EXPECT_FALSE(k->low_confidence);
}

TEST(ExtractBugKey, SignalOnlyFallsBackToCatchAll) {
  EXPECT_FALSE(extract_bug_key("Segmentation fault"));
  const auto k = bug_key_for("Segmentation fault");
  EXPECT_EQ(k.kind, KeyKind::kTrace);
  EXPECT_EQ(k.value, "Segmentation fault");
  EXPECT_TRUE(k.low_confidence);
}

TEST(ExtractBugKey, CatchAllUsesLastFiveLinesWithAddressesMasked) {
  const auto k = catch_all_key("a\nb\nc 0xdeadbeef\n\nd\ne\nf\n");
  EXPECT_EQ(k.value, "b\nc 0x?\nd\ne\nf");
}

TEST(ExtractBugKey, AssertionStyles) {
  EXPECT_EQ(extract_bug_key("x.cpp:3: Assertion `a < b' failed.")->value, "a < b");
  EXPECT_EQ(extract_bug_key("Assertion failed: (a < b), function f, file x.cpp, line 9.")->value,
            "a < b");
  EXPECT_EQ(extract_bug_key("panic: assert(ptr != 0)")->value, "ptr != 0");
  EXPECT_EQ(extract_bug_key("Assertion 'x  ==\t y' failed")->value, "x == y");
}

TEST(ExtractBugKey, FirstAssertionWins) {
  const auto k = extract_bug_key("Assertion 'first' failed\nAssertion 'second' failed\n");
  EXPECT_EQ(k->value, "first");
}

TEST(ExtractBugKey, ConfigurablePrefixes) {
  const std::string log = "#0 0x1 mlir::a\n#1 0x2 llvm::b\n";
  EXPECT_EQ(extract_bug_key(log, {"llvm::"})->value, "llvm::b");
  EXPECT_EQ(extract_bug_key(log, {"mlir::", "llvm::"})->value, "mlir::a\nllvm::b");
}

TEST(NormalizeAssertion, StripsLocations) {
  EXPECT_EQ(normalize_assertion("x  >  0 /src/a/B.cpp:12"), "x > 0");
  EXPECT_EQ(normalize_assertion("y, line 42"), "y");
}

TEST(KeyKind, Names) {
  EXPECT_EQ(key_kind_from_string(to_string(KeyKind::kAssertion)), KeyKind::kAssertion);
  EXPECT_EQ(key_kind_from_string(to_string(KeyKind::kTrace)), KeyKind::kTrace);
  EXPECT_THROW(key_kind_from_string("other"), Error);
}

// Each synthetic log carries the key its class should produce; those keys
// were written down without calling the extractor.
TEST(SyntheticCorpus, EveryLogYieldsItsClassKey) {
  const auto corpus = testing::synthetic_stderr_corpus(500, 1);
  for (const auto& c : corpus.crashes) {
    const auto k = bug_key_for(c.stderr_text);
    EXPECT_EQ(k.value, c.expected_key) << c.stderr_text;
    switch (c.style) {
      case testing::CrashStyle::kAssertion:
        EXPECT_EQ(k.kind, KeyKind::kAssertion);
        break;
      case testing::CrashStyle::kTrace:
        EXPECT_EQ(k.kind, KeyKind::kTrace);
        EXPECT_FALSE(k.low_confidence);
        for (std::size_t p = 0, q; p < k.value.size(); p = q + 1) {
          q = k.value.find('\n', p);
          if (q == std::string::npos) q = k.value.size();
          EXPECT_EQ(k.value.compare(p, 6, "mlir::"), 0);
        }
        break;
      case testing::CrashStyle::kSignalOnly:
        EXPECT_TRUE(k.low_confidence);
        break;
    }
  }
}

TEST(SyntheticCorpus, BucketCountEqualsClassCount) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto corpus = testing::synthetic_stderr_corpus(500, seed);
    BugRegistry reg;
    for (std::size_t i = 0; i < corpus.crashes.size(); ++i) {
      reg.register_crash(record("p" + std::to_string(i), "-x", corpus.crashes[i].stderr_text));
    }
    EXPECT_EQ(reg.bug_count(), corpus.class_count);
    EXPECT_EQ(reg.record_count(), 500u);
  }
}

TEST(SyntheticCorpus, KeysAreStable) {
  const auto corpus = testing::synthetic_stderr_corpus(100, 8);
  for (const auto& c : corpus.crashes) {
    EXPECT_EQ(bug_key_for(c.stderr_text), bug_key_for(c.stderr_text));
  }
}

// --- registry --------------------------------------------------------------

TEST(BugRegistry, SameAssertionTwoProgramsIsOneBug) {
  BugRegistry reg;
  EXPECT_EQ(reg.register_crash(record("a", "-x", "Assertion 'k' failed")), RegisterResult::kNewBug);
  EXPECT_EQ(reg.register_crash(record("b", "-x", "Assertion 'k' failed")),
            RegisterResult::kKnownBug);
  EXPECT_EQ(reg.bug_count(), 1u);
  EXPECT_EQ(reg.record_count(), 2u);
}

TEST(BugRegistry, DifferentAssertionsAreTwoBugs) {
  BugRegistry reg;
  reg.register_crash(record("a", "-x", "Assertion 'k1' failed"));
  reg.register_crash(record("a", "-y", "Assertion 'k2' failed"));
  EXPECT_EQ(reg.bug_count(), 2u);
  EXPECT_EQ(reg.buckets()[0].bug_id, 1u);
  EXPECT_EQ(reg.buckets()[1].bug_id, 2u);
}

TEST(BugRegistry, DuplicateOccurrenceIsIgnored) {
  BugRegistry reg;
  reg.register_crash(record("a", "-x", "Assertion 'k' failed"));
  EXPECT_EQ(reg.register_crash(record("a", "-x", "Assertion 'other' failed")),
            RegisterResult::kDuplicateOccurrence);
  EXPECT_EQ(reg.record_count(), 1u);
  EXPECT_EQ(reg.bug_count(), 1u);
}

TEST(BugRegistry, EmptyStderrRejected) {
  BugRegistry reg;
  auto r = record("a", "-x", "x");
  r.stderr_text.clear();
  EXPECT_THROW(reg.register_crash(r), Error);
}

TEST(BugRegistry, BucketsPartitionRecords) {
  const auto corpus = testing::synthetic_stderr_corpus(300, 4);
  BugRegistry reg;
  for (std::size_t i = 0; i < corpus.crashes.size(); ++i) {
    reg.register_crash(record("p" + std::to_string(i % 120), "-p" + std::to_string(i % 7),
                              corpus.crashes[i].stderr_text));
  }
  std::size_t total = 0;
  for (const auto& b : reg.buckets()) {
    total += b.records.size();
    for (const auto& r : b.records) EXPECT_EQ(r.bug_key, b.key);
    EXPECT_EQ(reg.find(b.key), &b);
  }
  EXPECT_EQ(total, reg.record_count());
}

TEST(BugRegistry, JsonlRoundTrip) {
  BugRegistry reg;
  const auto corpus = testing::synthetic_stderr_corpus(60, 5);
  for (std::size_t i = 0; i < corpus.crashes.size(); ++i) {
    reg.register_crash(record("p" + std::to_string(i), "-x", corpus.crashes[i].stderr_text,
                              static_cast<int>(i)));
  }
  const auto text = reg.to_jsonl();
  const auto back = BugRegistry::from_jsonl(text);
  EXPECT_EQ(back.to_jsonl(), text);
  EXPECT_EQ(back.keys(), reg.keys());
  EXPECT_THROW(BugRegistry::from_jsonl("{\"key_kind\": 1}\n"), Error);
}

// --- export ----------------------------------------------------------------

TEST(ExportRegistry, EmptyRegistry) {
  TempDir dir;
  export_registry(BugRegistry{}, dir.path());
  EXPECT_EQ(read_file(dir / "bugs.jsonl"), "");
}

TEST(ExportRegistry, OneDirectoryAndLinePerBug) {
  BugRegistry reg;
  reg.register_crash(record("a", "-x", "Assertion 'k1' failed", 1));
  reg.register_crash(record("b", "-y", "#0 0x1 mlir::f\n", 2));
  reg.register_crash(record("c", "-z", "Segmentation fault", 3));
  reg.register_crash(record("d", "-x", "Assertion 'k1' failed", 4));
  TempDir dir;
  export_registry(reg, dir.path());
  const auto index = load_bug_index(dir / "bugs.jsonl");
  ASSERT_EQ(index.size(), 3u);
  EXPECT_EQ(index[0].occurrences, 2u);
  EXPECT_EQ(index[1].key.kind, KeyKind::kTrace);
  EXPECT_TRUE(index[2].key.low_confidence);
  for (const auto& e : index) {
    const auto bug = dir / e.reproducer_path;
    EXPECT_EQ(read_file(bug), "module { }");
    for (const char* f : {"pass.txt", "stderr.txt", "key.txt", "meta.json"}) {
      EXPECT_TRUE(std::filesystem::exists(bug.parent_path() / f)) << f;
    }
  }
  const auto meta = nlohmann::json::parse(read_file(dir / "bug_0001" / "meta.json"));
  EXPECT_EQ(meta["first_seen_iteration"], 1);
  EXPECT_EQ(index[0].first_seen_iso8601, "2023-11-14T22:13:20.001Z");

  const auto first = read_file(dir / "bugs.jsonl");
  export_registry(reg, dir.path());
  EXPECT_EQ(read_file(dir / "bugs.jsonl"), first);
}

TEST(ExportRegistry, IndexFieldNames) {
  BugRegistry reg;
  reg.register_crash(record("a", "-x", "Assertion 'k1' failed"));
  TempDir dir;
  export_registry(reg, dir.path());
  const auto j = nlohmann::json::parse(read_file(dir / "bugs.jsonl"));
  for (const char* k : {"bug_id", "key_kind", "key_value", "occurrences", "first_seen_iso8601",
                        "reproducer_path", "pass_flag"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
}

TEST(LoadBugIndex, MalformedNamesPathAndLine) {
  TempDir dir;
  write_file_atomic(dir / "bugs.jsonl", "{\"bug_id\":1}\n");
  try {
    load_bug_index(dir / "bugs.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedInput);
    EXPECT_NE(std::string(e.what()).find("bugs.jsonl:1"), std::string::npos);
  }
}

TEST(Timestamps, Iso8601) {
  EXPECT_EQ(to_iso8601(Timestamp(std::chrono::milliseconds(0))), "1970-01-01T00:00:00.000Z");
  EXPECT_EQ(to_iso8601(Timestamp(std::chrono::milliseconds(86'400'123))),
            "1970-01-02T00:00:00.123Z");
}

}  // namespace
}  // namespace adaptfuzz::triage
