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
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adaptfuzz/campaign/config.hpp"
#include "adaptfuzz/corpus/store.hpp"
#include "adaptfuzz/generator/backend.hpp"
#include "adaptfuzz/harness/compiler.hpp"
#include "adaptfuzz/harness/pass_list.hpp"
#include "adaptfuzz/harness/sweep.hpp"
#include "adaptfuzz/rng.hpp"
#include "adaptfuzz/triage/registry.hpp"

namespace adaptfuzz::campaign {

struct IterationReport {
  int iteration = 0;
  std::size_t seeds_sampled = 0;
  std::size_t generated = 0;
  std::size_t compile_valid = 0;
  std::size_t crashes = 0;
  std::size_t new_bugs = 0;
  std::size_t programs_added = 0;
  std::size_t transformed_added = 0;
  std::size_t timeouts = 0;
  std::size_t run_errors = 0;  // adapter exceptions, contained
  std::size_t corpus_size = 0;  // after augmentation
  std::chrono::milliseconds elapsed{0};
  bool truncated = false;  // budget ran out mid-iteration

  bool operator==(const IterationReport&) const = default;

  std::string to_json() const;  // single line
  /// Throws Error(kMalformedInput).
  static IterationReport from_json(std::string_view line);
};

std::string reports_to_jsonl(const std::vector<IterationReport>& reports);
std::vector<IterationReport> reports_from_jsonl(std::string_view text);

/// Everything a campaign carries from one iteration to the next.
struct CampaignState {
  int iteration = 0;  // last completed iteration
  corpus::CorpusStore corpus;
  triage::BugRegistry registry;
  Rng rng{0};
  generator::BackendPtr model;  // the last trained model, if any
  std::vector<IterationReport> reports;
  std::chrono::milliseconds clock{0};  // campaign time consumed so far
  triage::Timestamp origin{};          // when the campaign started
};

/// Observes each iteration's generated programs and their compile-check
/// verdicts, in generation order. Used by tests as an independent record.
using GeneratedObserver = std::function<void(
    int iteration, const std::vector<corpus::ProgramPtr>& generated,
    const std::vector<bool>& compiled)>;

/// Adds transformed outputs to the corpus as Transformed programs named
/// `t<iteration>-<n>`, skipping exact duplicates and outputs that tokenize
/// to nothing. Returns the number added.
std::size_t augment_training_set(corpus::CorpusStore& corpus,
                                 const std::vector<harness::TransformedProgram>& transformed,
                                 int iteration);

class Campaign {
 public:
  /// `backend` is the untrained model prototype; each iteration trains a
  /// fresh model from it. Throws Error(kConfigInvalid) or, with no seeds,
  /// Error(kEmptyCorpus).
  Campaign(CampaignConfig cfg, const corpus::CorpusStore& seeds,
           const harness::CompilerAdapter& compiler, generator::BackendPtr backend,
           std::vector<harness::PassSpec> passes);

  /// Restores the state written by write_checkpoint(). Throws
  /// Error(kCorruptCheckpoint) when any artifact is missing or its hash
  /// disagrees with meta.json.
  static Campaign resume(const std::filesystem::path& checkpoint_dir,
                         CampaignConfig cfg, const harness::CompilerAdapter& compiler,
                         generator::BackendPtr backend,
                         std::vector<harness::PassSpec> passes);

  /// Train, sample, generate, compile-check, sweep, register, augment.
  IterationReport run_iteration();

  /// Iterates until max_iterations or the budget is spent. Writes
  /// `<checkpoint_root>/iter_<n>/` after every iteration when given.
  const CampaignState& run(const std::optional<std::filesystem::path>& checkpoint_root = {});

  void write_checkpoint(const std::filesystem::path& dir) const;

  bool budget_exhausted() const;
  bool finished() const;

  const CampaignState& state() const { return state_; }
  const CampaignConfig& config() const { return cfg_; }
  void set_observer(GeneratedObserver observer) { observer_ = std::move(observer); }

 private:
  Campaign(CampaignConfig cfg, const harness::CompilerAdapter& compiler,
           generator::BackendPtr backend, std::vector<harness::PassSpec> passes);

  std::chrono::milliseconds now() const;
  triage::Timestamp stamp() const;

  CampaignConfig cfg_;
  const harness::CompilerAdapter* compiler_;
  generator::BackendPtr prototype_;
  std::vector<harness::PassSpec> passes_;
  CampaignState state_;
  GeneratedObserver observer_;
  std::chrono::steady_clock::time_point wall_start_;
  std::chrono::milliseconds clock_base_{0};
};

/// Convenience wrapper: Campaign(...).run(checkpoint_root).
CampaignState run_campaign(const CampaignConfig& cfg, const corpus::CorpusStore& seeds,
                           const harness::CompilerAdapter& compiler,
                           generator::BackendPtr backend,
                           std::vector<harness::PassSpec> passes,
                           const std::optional<std::filesystem::path>& checkpoint_root = {});

/// Directory name of iteration n's checkpoint.
std::string checkpoint_name(int iteration);

// A finished campaign directory:
//
//   config.json       effective CampaignConfig
//   reports.jsonl     one IterationReport per line
//   timeline.jsonl    {bug_id, iteration, elapsed_ms} per bug, first-seen order
//   corpus/           final training set (corpus layout)
//   bugs/             export_registry() bundle
//   checkpoints/      iter_<n>/ per iteration
inline constexpr const char* kReportsFile = "reports.jsonl";
inline constexpr const char* kTimelineFile = "timeline.jsonl";
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kCorpusDir = "corpus";
inline constexpr const char* kBugsDir = "bugs";
inline constexpr const char* kCheckpointsDir = "checkpoints";

/// Writes everything above except checkpoints. Throws Error(kIoFailure).
void write_campaign_outputs(const CampaignState& state, const CampaignConfig& cfg,
                            const std::filesystem::path& out_dir);

}  // namespace adaptfuzz::campaign
