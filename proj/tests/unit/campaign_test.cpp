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

#include <algorithm>
#include <nlohmann/json.hpp>

#include "adaptfuzz/campaign/campaign.hpp"
#include "adaptfuzz/corpus/layout.hpp"
#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/generator/ngram.hpp"
#include "adaptfuzz/harness/faultline.hpp"
#include "faultline_oracle.hpp"
#include "test_support.hpp"

namespace adaptfuzz::campaign {
namespace {

using nlohmann::json;
using testing::TempDir;

std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::vector<corpus::Token> token_pool(const corpus::CorpusStore& store) {
  std::vector<corpus::Token> pool;
  for (const auto& p : store.entries()) {
    pool.insert(pool.end(), p->tokens().begin(), p->tokens().end());
  }
  return pool;
}

generator::BackendPtr ngram() { return std::make_shared<const generator::NGramModel>(); }

CampaignConfig small_config() {
  CampaignConfig cfg;
  cfg.max_iterations = 2;
  cfg.epochs = 1;
  cfg.max_seed_samples = 6;
  cfg.token_limit = 150;
  cfg.clock = ClockKind::kLogical;
  cfg.rng_seed = 17;
  return cfg;
}

class CampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    seeds_ = testing::fixture_corpus(20);
    passes_ = testing::fixture_passes();
    harness::FaultlineGenOptions fo;
    fo.rng_seed = 9;
    fo.fault_count = 12;
    spec_ = harness::random_faultline_spec(token_pool(seeds_), passes_, fo);
    compiler_ = std::make_unique<harness::FaultlineCompiler>(spec_);
  }

  corpus::CorpusStore seeds_;
  std::vector<harness::PassSpec> passes_;
  harness::FaultlineSpec spec_;
  std::unique_ptr<harness::FaultlineCompiler> compiler_;
};

// --- configuration -----------------------------------------------------------

TEST(CampaignConfig, JsonRoundTrip) {
  CampaignConfig cfg;
  cfg.max_iterations = 7;
  cfg.temperature = 0.5;
  cfg.wall_clock_budget = std::chrono::milliseconds(90'000);
  cfg.mode = Mode::kNoAugmentationAblation;
  cfg.clock = ClockKind::kLogical;
  cfg.frame_prefixes = {"mlir::", "llvm::"};
  const auto back = CampaignConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  const auto j = json::parse(cfg.to_json());
  EXPECT_EQ(j["wall_clock_budget"], 90.0);
  EXPECT_EQ(j["mode"], "NoAugmentationAblation");
  EXPECT_TRUE(json::parse(CampaignConfig{}.to_json())["wall_clock_budget"].is_null());
}

TEST(CampaignConfig, MissingKeysKeepDefaults) {
  const auto cfg = CampaignConfig::from_json(R"({"max_iterations": 3})");
  EXPECT_EQ(cfg.max_iterations, 3);
  EXPECT_EQ(cfg.candidates_per_seed, 4u);
  EXPECT_EQ(cfg.prefix_len, 3u);
  EXPECT_EQ(cfg.max_seed_samples, 35'000u);
}

TEST(CampaignConfig, Rejections) {
  EXPECT_EQ(code_of([] { CampaignConfig::from_json(R"({"bogus": 1})"); }),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { CampaignConfig::from_json(R"({"epochs": "five"})"); }),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { CampaignConfig::from_json(R"({"temperature": 0})"); }),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { CampaignConfig::from_json(R"({"mode": "Fast"})"); }),
            ErrorCode::kConfigInvalid);
  EXPECT_EQ(code_of([] { CampaignConfig::from_json("[1"); }), ErrorCode::kConfigInvalid);
  CampaignConfig cfg;
  cfg.prefix_len = 700;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigInvalid);
  cfg = {};
  cfg.candidates_per_seed = 0;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::kConfigInvalid);
}

TEST(CampaignConfig, ErrorNamesField) {
  try {
    CampaignConfig::from_json(R"({"worker_pool_width": 0})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("worker_pool_width"), std::string::npos);
  }
}

TEST(CampaignConfig, Overrides) {
  CampaignConfig cfg;
  cfg.apply_overrides({{"max_iterations", "3"},
                       {"mode", "GreedyAblation"},
                       {"clock", "logical"},
                       {"temperature", "0.7"}});
  EXPECT_EQ(cfg.max_iterations, 3);
  EXPECT_EQ(cfg.mode, Mode::kGreedyAblation);
  EXPECT_EQ(cfg.clock, ClockKind::kLogical);
  EXPECT_DOUBLE_EQ(cfg.temperature, 0.7);
  EXPECT_EQ(code_of([&] { cfg.apply_overrides({{"nope", "1"}}); }), ErrorCode::kConfigInvalid);
}

TEST(CampaignConfig, GreedyEffectivePinsPrefixAndFanOut) {
  CampaignConfig cfg;
  cfg.mode = Mode::kGreedyAblation;
  const auto eff = cfg.effective();
  EXPECT_EQ(eff.prefix_len, 10u);
  EXPECT_EQ(eff.candidates_per_seed, 1u);
  EXPECT_EQ(cfg.effective().generation(3).rng_seed, 3u);
}

TEST(IterationReport, JsonRoundTrip) {
  IterationReport r;
  r.iteration = 4;
  r.generated = 40;
  r.compile_valid = 12;
  r.crashes = 3;
  r.elapsed = std::chrono::milliseconds(1234);
  r.truncated = true;
  EXPECT_EQ(IterationReport::from_json(r.to_json()), r);
  EXPECT_EQ(reports_from_jsonl(reports_to_jsonl({r, r})).size(), 2u);
  EXPECT_THROW(IterationReport::from_json("{}"), Error);
}

// --- construction ----------------------------------------------------------

TEST_F(CampaignTest, EmptySeedsRejected) {
  EXPECT_EQ(code_of([&] { Campaign(small_config(), corpus::CorpusStore{}, *compiler_, ngram(), passes_); }),
            ErrorCode::kEmptyCorpus);
  EXPECT_EQ(code_of([&] { Campaign(small_config(), seeds_, *compiler_, nullptr, passes_); }),
            ErrorCode::kConfigInvalid);
}

// --- iteration shape -------------------------------------------------------

TEST_F(CampaignTest, GeneratedIsSeedsTimesFanOut) {
  auto cfg = small_config();
  cfg.max_iterations = 1;
  cfg.max_seed_samples = 10;
  Campaign c(cfg, testing::fixture_corpus(10), *compiler_, ngram(), passes_);
  const auto rep = c.run_iteration();
  EXPECT_EQ(rep.seeds_sampled, 10u);
  EXPECT_EQ(rep.generated, 40u);
  EXPECT_LE(rep.compile_valid, rep.generated);
}

TEST_F(CampaignTest, GreedyGeneratesOnePerSeed) {
  auto cfg = small_config();
  cfg.mode = Mode::kGreedyAblation;
  cfg.max_iterations = 1;
  cfg.max_seed_samples = 10;
  Campaign c(cfg, testing::fixture_corpus(10), *compiler_, ngram(), passes_);
  std::vector<corpus::ProgramPtr> seen;
  c.set_observer([&](int, const auto& generated, const auto&) { seen = generated; });
  const auto rep = c.run_iteration();
  EXPECT_EQ(rep.generated, rep.seeds_sampled);
  for (const auto& q : seen) EXPECT_EQ(q->provenance(), corpus::Provenance::kGenerated);
}

TEST_F(CampaignTest, NoAugmentationKeepsCorpusConstant) {
  auto cfg = small_config();
  cfg.mode = Mode::kNoAugmentationAblation;
  cfg.max_iterations = 3;
  const auto st = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  ASSERT_EQ(st.reports.size(), 3u);
  for (const auto& r : st.reports) {
    EXPECT_EQ(r.corpus_size, seeds_.size());
    EXPECT_EQ(r.programs_added + r.transformed_added, 0u);
  }
  EXPECT_EQ(st.corpus.size(), seeds_.size());
}

TEST_F(CampaignTest, PerturbedCorpusConservation) {
  auto cfg = small_config();
  cfg.max_iterations = 3;
  const auto st = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  std::size_t prev = seeds_.size();
  for (const auto& r : st.reports) {
    EXPECT_EQ(r.corpus_size, prev + r.programs_added + r.transformed_added);
    EXPECT_GE(r.corpus_size, prev);
    prev = r.corpus_size;
  }
  EXPECT_EQ(st.corpus.size(), prev);
  for (const auto& p : st.corpus.entries()) {
    if (p->provenance() == corpus::Provenance::kTransformed) {
      EXPECT_TRUE(p->parent_id().has_value());
      EXPECT_GE(p->origin_iteration(), 1);
    }
  }
}

TEST_F(CampaignTest, SingleIterationGivesOneReport) {
  auto cfg = small_config();
  cfg.max_iterations = 1;
  const auto st = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  ASSERT_EQ(st.reports.size(), 1u);
  EXPECT_EQ(st.iteration, 1);
  EXPECT_EQ(st.reports[0].iteration, 1);
}

TEST_F(CampaignTest, ZeroBudgetRunsNothing) {
  auto cfg = small_config();
  cfg.wall_clock_budget = std::chrono::milliseconds(0);
  const auto st = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  EXPECT_TRUE(st.reports.empty());
  EXPECT_EQ(st.registry.bug_count(), 0u);
  EXPECT_EQ(st.corpus.size(), seeds_.size());
}

TEST_F(CampaignTest, LogicalBudgetTruncatesMidIteration) {
  auto cfg = small_config();
  cfg.max_iterations = 5;
  cfg.sweep_batch = 1;
  // The compile check plus the sweep cost |passes| + 1 logical ms per program.
  cfg.wall_clock_budget = std::chrono::milliseconds(3 * (passes_.size() + 1));
  const auto st = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  ASSERT_FALSE(st.reports.empty());
  EXPECT_LT(st.reports.size(), 5u);
  EXPECT_TRUE(st.reports.back().truncated);
  for (std::size_t i = 0; i + 1 < st.reports.size(); ++i) EXPECT_FALSE(st.reports[i].truncated);
  EXPECT_GE(st.clock, *cfg.wall_clock_budget);
}

// --- augmentation ----------------------------------------------------------

TEST(Augment, AddsDistinctNonEmptyOutputs) {
  corpus::CorpusStore store;
  store.add(corpus::TestProgram::from_text("s1", "module { }", corpus::Provenance::kSeed, 0,
                                           std::nullopt));
  const std::vector<harness::TransformedProgram> t{
      {"s1", "-a", "module { }"},            // already present
      {"s1", "-b", "module { x }\n"},
      {"s1", "-c", "module { x }\n"},        // duplicate of the previous
      {"s1", "-d", "\n\n"},                  // nothing left after tokenizing
      {"s1", "-e", "module { y }\n"}};
  EXPECT_EQ(augment_training_set(store, t, 3), 2u);
  ASSERT_EQ(store.size(), 3u);
  const auto e = store.entries();
  EXPECT_EQ(e[1]->id(), "t3-1");
  EXPECT_EQ(e[2]->id(), "t3-2");
  EXPECT_EQ(e[1]->provenance(), corpus::Provenance::kTransformed);
  EXPECT_EQ(e[1]->parent_id(), "s1");
  EXPECT_EQ(e[1]->origin_iteration(), 3);
  EXPECT_EQ(augment_training_set(store, t, 4), 0u);
}

// --- checkpoints -----------------------------------------------------------

TEST_F(CampaignTest, ResumeEqualsUninterrupted) {
  auto cfg = small_config();
  cfg.max_iterations = 5;
  TempDir full_dir, split_dir;
  const auto full = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_, full_dir.path());

  auto first = cfg;
  first.max_iterations = 3;
  run_campaign(first, seeds_, *compiler_, ngram(), passes_, split_dir.path());
  auto resumed = Campaign::resume(split_dir / checkpoint_name(3), cfg, *compiler_, ngram(), passes_);
  EXPECT_EQ(resumed.state().iteration, 3);
  const auto& st = resumed.run(split_dir.path());

  EXPECT_EQ(reports_to_jsonl(st.reports), reports_to_jsonl(full.reports));
  EXPECT_EQ(st.registry.to_jsonl(), full.registry.to_jsonl());
  EXPECT_EQ(corpus::serialize_snapshot(st.corpus), corpus::serialize_snapshot(full.corpus));
  EXPECT_EQ(read_file(split_dir / checkpoint_name(5) / "rng.state"),
            read_file(full_dir / checkpoint_name(5) / "rng.state"));
}

TEST_F(CampaignTest, ResumeAtFinalIterationDoesNothing) {
  auto cfg = small_config();
  TempDir dir;
  const auto st = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_, dir.path());
  auto c = Campaign::resume(dir / checkpoint_name(2), cfg, *compiler_, ngram(), passes_);
  EXPECT_TRUE(c.finished());
  const auto& after = c.run();
  EXPECT_EQ(after.reports, st.reports);
}

TEST_F(CampaignTest, TamperedCheckpointIsCorrupt) {
  auto cfg = small_config();
  cfg.max_iterations = 1;
  TempDir dir;
  run_campaign(cfg, seeds_, *compiler_, ngram(), passes_, dir.path());
  const auto ck = dir / checkpoint_name(1);
  for (const char* f : {"corpus.manifest", "model.snap", "registry.jsonl", "rng.state"}) {
    const auto original = read_file(ck / f);
    write_file_atomic(ck / f, original + " ");
    try {
      Campaign::resume(ck, cfg, *compiler_, ngram(), passes_);
      ADD_FAILURE() << f;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kCorruptCheckpoint) << f;
      EXPECT_NE(std::string(e.what()).find(ck.string()), std::string::npos);
    }
    write_file_atomic(ck / f, original);
  }
  std::filesystem::remove(ck / "meta.json");
  EXPECT_EQ(code_of([&] { Campaign::resume(ck, cfg, *compiler_, ngram(), passes_); }),
            ErrorCode::kCorruptCheckpoint);
}

// --- determinism -----------------------------------------------------------

TEST_F(CampaignTest, ReproducibleAcrossWorkerWidths) {
  auto cfg = small_config();
  TempDir a, b;
  const auto s1 = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  cfg.worker_pool_width = 4;
  const auto s2 = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  write_campaign_outputs(s1, cfg, a.path());
  write_campaign_outputs(s2, cfg, b.path());
  EXPECT_EQ(testing::snapshot_tree(a.path()), testing::snapshot_tree(b.path()));
  EXPECT_FALSE(read_file(a / kReportsFile).empty());
}

TEST_F(CampaignTest, DifferentSeedsDiverge) {
  auto cfg = small_config();
  const auto s1 = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  cfg.rng_seed = 18;
  const auto s2 = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  EXPECT_NE(corpus::serialize_snapshot(s1.corpus), corpus::serialize_snapshot(s2.corpus));
}

TEST_F(CampaignTest, RegistryIsAppendOnly) {
  auto cfg = small_config();
  cfg.max_iterations = 4;
  Campaign c(cfg, seeds_, *compiler_, ngram(), passes_);
  std::vector<triage::BugKey> prev_keys;
  std::size_t prev_records = 0;
  while (!c.finished()) {
    const auto rep = c.run_iteration();
    std::vector<triage::BugKey> keys;
    for (const auto& b : c.state().registry.buckets()) keys.push_back(b.key);
    ASSERT_GE(keys.size(), prev_keys.size());
    EXPECT_TRUE(std::equal(prev_keys.begin(), prev_keys.end(), keys.begin()));
    EXPECT_EQ(keys.size(), prev_keys.size() + rep.new_bugs);
    EXPECT_GE(c.state().registry.record_count(), prev_records);
    prev_keys = keys;
    prev_records = c.state().registry.record_count();
  }
}

TEST_F(CampaignTest, OutputsLayout) {
  auto cfg = small_config();
  TempDir dir;
  const auto st = run_campaign(cfg, seeds_, *compiler_, ngram(), passes_);
  write_campaign_outputs(st, cfg, dir.path());
  EXPECT_EQ(CampaignConfig::from_json(read_file(dir / kConfigFile)).to_json(), cfg.to_json());
  EXPECT_EQ(reports_from_jsonl(read_file(dir / kReportsFile)), st.reports);
  EXPECT_EQ(corpus::load_corpus(dir / kCorpusDir).size(), st.corpus.size());
  EXPECT_EQ(triage::load_bug_index(dir / kBugsDir / "bugs.jsonl").size(), st.registry.bug_count());
  const auto timeline = read_file(dir / kTimelineFile);
  EXPECT_EQ(static_cast<std::size_t>(std::count(timeline.begin(), timeline.end(), '\n')),
            st.registry.bug_count());
}

// Every count in every report agrees with a replay of the generated programs
// through the reference semantics, over random specs and configurations.
TEST(CampaignProperty, CountsMatchOracle) {
  const auto all_seeds = testing::fixture_corpus();
  const auto all_passes = testing::fixture_passes();
  const auto pool = token_pool(all_seeds);
  Rng rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<harness::PassSpec> passes;
    for (std::size_t i = rng.below(8); i < all_passes.size(); i += 8 + rng.below(12)) {
      passes.push_back(all_passes[i]);
    }
    harness::FaultlineGenOptions fo;
    fo.rng_seed = rng.next();
    fo.fault_count = 4 + rng.below(12);
    fo.hang_count = rng.below(2);
    fo.shared_signature_rate = rng.below(2) ? 0.3 : 0.0;
    const auto spec = harness::random_faultline_spec(pool, passes, fo);
    const harness::FaultlineCompiler compiler(spec);

    CampaignConfig cfg;
    cfg.clock = ClockKind::kLogical;
    cfg.max_iterations = 1 + static_cast<int>(rng.below(2));
    cfg.epochs = 1;
    cfg.max_seed_samples = 2 + rng.below(4);
    cfg.candidates_per_seed = 1 + rng.below(4);
    cfg.token_limit = 40 + rng.below(120);
    cfg.temperature = 0.5 + rng.unit();
    cfg.worker_pool_width = 1 + rng.below(3);
    cfg.mode = static_cast<Mode>(rng.below(3));
    cfg.rng_seed = rng.next();
    cfg.ngram_order = 3;

    const auto seeds = testing::fixture_corpus(5 + rng.below(30));
    std::vector<std::string> flags;
    for (const auto& p : passes) flags.push_back(p.flag);
    std::set<std::string> known;
    std::set<std::string> texts;
    for (const auto& p : seeds.entries()) texts.insert(p->text());

    Campaign c(cfg, seeds, compiler, ngram(), passes);
    std::vector<testing::IterationExpectation> expected;
    c.set_observer([&](int, const std::vector<corpus::ProgramPtr>& generated,
                       const std::vector<bool>& compiled) {
      expected.push_back(testing::replay_iteration(
          spec, generated, flags, cfg.mode != Mode::kNoAugmentationAblation, known, texts));
      std::size_t n = 0;
      for (std::size_t i = 0; i < generated.size(); ++i) {
        const bool ok = testing::oracle_run(spec, generated[i]->tokens(), std::nullopt).kind ==
                        harness::OutcomeKind::kValid;
        EXPECT_EQ(compiled[i], ok);
        n += ok;
      }
      EXPECT_EQ(n, expected.back().compile_valid);
    });
    const auto& st = c.run();
    ASSERT_EQ(st.reports.size(), expected.size()) << "trial " << trial;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto& r = st.reports[i];
      const auto& e = expected[i];
      EXPECT_EQ(r.compile_valid, e.compile_valid) << "trial " << trial;
      EXPECT_EQ(r.crashes, e.crashes) << "trial " << trial;
      EXPECT_EQ(r.new_bugs, e.new_bugs) << "trial " << trial;
      EXPECT_EQ(r.timeouts, e.timeouts) << "trial " << trial;
      EXPECT_EQ(r.programs_added, e.programs_added) << "trial " << trial;
      EXPECT_EQ(r.transformed_added, e.transformed_added) << "trial " << trial;
      EXPECT_EQ(r.run_errors, 0u);
    }
    EXPECT_EQ(st.registry.bug_count(), known.size());
  }
}

}  // namespace
}  // namespace adaptfuzz::campaign
