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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adaptfuzz/campaign/campaign.hpp"
#include "adaptfuzz/corpus/store.hpp"
#include "adaptfuzz/triage/bug_key.hpp"

namespace adaptfuzz::metrics {

using std::chrono::milliseconds;

// --- time series -----------------------------------------------------------

struct CampaignEvent {
  milliseconds at{0};
  std::size_t new_bugs = 0;
  std::size_t new_tests = 0;
};

struct TimeSeriesPoint {
  milliseconds elapsed{0};
  std::size_t cumulative_bugs = 0;
  std::size_t cumulative_tests = 0;

  bool operator==(const TimeSeriesPoint&) const = default;
};

/// Cumulative counts sampled at interval, 2*interval, ... up to the first
/// multiple covering both the last event and `horizon`. An event at time t
/// is counted at every sample >= t. Always returns at least one point.
/// Throws Error(kInvalidArgument) for a non-positive interval.
std::vector<TimeSeriesPoint> bugs_over_time(std::vector<CampaignEvent> events,
                                            milliseconds interval = std::chrono::hours(1),
                                            milliseconds horizon = milliseconds(0));

// --- rates -----------------------------------------------------------------

/// Sum of generated over sum of elapsed minutes. Throws
/// Error(kZeroElapsed) when no time elapsed.
double throughput(const std::vector<campaign::IterationReport>& reports);

/// Sum of compile_valid over sum of generated. Throws Error(kNoTests).
double validity_rate(const std::vector<campaign::IterationReport>& reports);

// --- overlap ---------------------------------------------------------------

struct OverlapRegion {
  std::vector<std::string> labels;  // members of the label set, input order
  std::size_t size = 0;
  std::size_t trace_keys = 0;  // lower-confidence matches in the region
};

struct OverlapReport {
  std::vector<std::string> labels;
  std::vector<std::size_t> per_label;  // distinct keys per label
  /// Bugs found by exactly this label set, one entry per non-empty subset,
  /// ordered by subset bitmask (bit i = labels[i]).
  std::vector<OverlapRegion> exclusive;
  /// |A ∩ B| for every pair, in (i, j) order with i < j.
  std::vector<OverlapRegion> pairwise;
  std::size_t union_size = 0;
};

using LabeledKeys = std::vector<std::pair<std::string, std::set<triage::BugKey>>>;

/// Throws Error(kInvalidArgument) with fewer than 2 or more than 16 sets or
/// duplicate labels.
OverlapReport overlap(const LabeledKeys& sets);

// --- coverage --------------------------------------------------------------

struct CoveragePoint {
  double seconds = 0.0;
  double percent = 0.0;

  bool operator==(const CoveragePoint&) const = default;
};

/// Two-column `timestamp,percent` CSV with an optional header row. Throws
/// Error(kMalformedCsv) naming the offending line.
std::vector<CoveragePoint> parse_coverage_csv(std::string_view text);
std::vector<CoveragePoint> ingest_coverage_summary(const std::filesystem::path& path);

// --- reports ---------------------------------------------------------------

struct BugSummary {
  std::size_t bug_id = 0;
  triage::BugKey key;
  std::size_t occurrences = 0;
  int first_seen_iteration = 0;
  milliseconds first_seen_elapsed{0};
};

/// Everything emit_report reads.
struct CampaignArtifacts {
  std::string label = "campaign";
  std::string mode;
  std::vector<campaign::IterationReport> reports;
  std::vector<BugSummary> bugs;
  corpus::CorpusStats corpus;
  std::optional<std::vector<CoveragePoint>> coverage;
};

CampaignArtifacts artifacts_from_state(const campaign::CampaignState& state,
                                       const campaign::CampaignConfig& cfg,
                                       std::string label = "campaign");

/// Reads a directory written by campaign::write_campaign_outputs. Missing
/// files are Error(kIoFailure); unparsable ones Error(kMalformedInput),
/// both naming the path.
CampaignArtifacts load_artifacts(const std::filesystem::path& campaign_dir);

struct ReportOptions {
  milliseconds interval = std::chrono::hours(1);
};

/// Writes report.json, bugs_over_time.csv, corpus_stats.json and
/// overlap.json into `dir`. `others` are comparison campaigns; report.json
/// only carries an overlap section when there is at least one. Output is a
/// pure function of the inputs. Throws Error(kIoFailure).
void emit_report(const CampaignArtifacts& main, const std::vector<CampaignArtifacts>& others,
                 const std::filesystem::path& dir, const ReportOptions& options = {});

}  // namespace adaptfuzz::metrics
