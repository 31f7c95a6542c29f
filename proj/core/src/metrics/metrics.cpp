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

#include "adaptfuzz/metrics/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "adaptfuzz/corpus/layout.hpp"
#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/triage/registry.hpp"

namespace adaptfuzz::metrics {

using nlohmann::json;

std::vector<TimeSeriesPoint> bugs_over_time(std::vector<CampaignEvent> events,
                                            milliseconds interval, milliseconds horizon) {
  if (interval.count() <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "bugs_over_time: interval must be positive");
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.at < b.at; });
  milliseconds end = std::max(horizon, milliseconds(0));
  if (!events.empty()) end = std::max(end, events.back().at);
  const auto samples = std::max<std::int64_t>(
      1, (end.count() + interval.count() - 1) / interval.count());

  std::vector<TimeSeriesPoint> out;
  out.reserve(static_cast<std::size_t>(samples));
  std::size_t next = 0, bugs = 0, tests = 0;
  for (std::int64_t k = 1; k <= samples; ++k) {
    const auto t = interval * k;
    while (next < events.size() && events[next].at <= t) {
      bugs += events[next].new_bugs;
      tests += events[next].new_tests;
      ++next;
    }
    out.push_back({t, bugs, tests});
  }
  return out;
}

double throughput(const std::vector<campaign::IterationReport>& reports) {
  std::size_t tests = 0;
  milliseconds elapsed{0};
  for (const auto& r : reports) {
    tests += r.generated;
    elapsed += r.elapsed;
  }
  if (elapsed.count() <= 0) {
    throw Error(ErrorCode::kZeroElapsed, "throughput: no elapsed time");
  }
  return static_cast<double>(tests) / (static_cast<double>(elapsed.count()) / 60'000.0);
}

double validity_rate(const std::vector<campaign::IterationReport>& reports) {
  std::size_t generated = 0, valid = 0;
  for (const auto& r : reports) {
    generated += r.generated;
    valid += r.compile_valid;
  }
  if (generated == 0) throw Error(ErrorCode::kNoTests, "validity_rate: nothing generated");
  return static_cast<double>(valid) / static_cast<double>(generated);
}

OverlapReport overlap(const LabeledKeys& sets) {
  if (sets.size() < 2 || sets.size() > 16) {
    throw Error(ErrorCode::kInvalidArgument, "overlap: needs between 2 and 16 key sets");
  }
  OverlapReport rep;
  std::map<triage::BugKey, unsigned> membership;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& [label, keys] = sets[i];
    if (std::find(rep.labels.begin(), rep.labels.end(), label) != rep.labels.end()) {
      throw Error(ErrorCode::kInvalidArgument, "overlap: duplicate label " + label);
    }
    rep.labels.push_back(label);
    rep.per_label.push_back(keys.size());
    for (const auto& k : keys) membership[k] |= 1u << i;
  }
  auto labels_of = [&](unsigned mask) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (mask & (1u << i)) out.push_back(rep.labels[i]);
    }
    return out;
  };
  const unsigned full = (1u << sets.size()) - 1;
  rep.exclusive.resize(full);
  for (unsigned mask = 1; mask <= full; ++mask) rep.exclusive[mask - 1].labels = labels_of(mask);
  for (const auto& [key, mask] : membership) {
    auto& region = rep.exclusive[mask - 1];
    ++region.size;
    if (key.kind == triage::KeyKind::kTrace) ++region.trace_keys;
  }
  rep.union_size = membership.size();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      OverlapRegion r{{rep.labels[i], rep.labels[j]}, 0, 0};
      const unsigned pair = (1u << i) | (1u << j);
      for (const auto& [key, mask] : membership) {
        if ((mask & pair) != pair) continue;
        ++r.size;
        if (key.kind == triage::KeyKind::kTrace) ++r.trace_keys;
      }
      rep.pairwise.push_back(std::move(r));
    }
  }
  return rep;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::vector<CoveragePoint> parse_coverage_csv(std::string_view text) {
  std::vector<CoveragePoint> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kMalformedCsv, "line " + std::to_string(lineno) + ": " + why);
    };
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      fail("expected two comma-separated columns");
    }
    const auto a = trim(std::string_view(line).substr(0, comma));
    const auto b = trim(std::string_view(line).substr(comma + 1));
    CoveragePoint p;
    if (!parse_double(a, p.seconds) || !parse_double(b, p.percent)) {
      if (!seen_data && out.empty() && a == "timestamp" && b == "percent") continue;
      fail("non-numeric field");
    }
    if (p.seconds < 0 || p.percent < 0 || p.percent > 100) fail("value out of range");
    seen_data = true;
    out.push_back(p);
  }
  return out;
}

std::vector<CoveragePoint> ingest_coverage_summary(const std::filesystem::path& path) {
  try {
    return parse_coverage_csv(read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMalformedCsv) throw;
    throw Error(ErrorCode::kMalformedCsv, path.string() + ": " + e.what());
  }
}

CampaignArtifacts artifacts_from_state(const campaign::CampaignState& state,
                                       const campaign::CampaignConfig& cfg, std::string label) {
  CampaignArtifacts a;
  a.label = std::move(label);
  a.mode = std::string(campaign::to_string(cfg.mode));
  a.reports = state.reports;
  for (const auto& b : state.registry.buckets()) {
    const auto& first = b.records.front();
    a.bugs.push_back(BugSummary{b.bug_id, b.key, b.records.size(), first.iteration,
                                first.first_seen - state.origin});
  }
  a.corpus = corpus::corpus_stats(state.corpus);
  return a;
}

CampaignArtifacts load_artifacts(const std::filesystem::path& dir) {
  CampaignArtifacts a;
  a.label = dir.filename().empty() ? dir.parent_path().filename().string()
                                   : dir.filename().string();
  auto malformed = [](const std::filesystem::path& p, const std::string& why) {
    return Error(ErrorCode::kMalformedInput, p.string() + ": " + why);
  };

  const auto config_path = dir / campaign::kConfigFile;
  try {
    a.mode = json::parse(read_file(config_path)).at("mode").get<std::string>();
  } catch (const json::exception& e) {
    throw malformed(config_path, e.what());
  }

  const auto reports_path = dir / campaign::kReportsFile;
  try {
    a.reports = campaign::reports_from_jsonl(read_file(reports_path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMalformedInput) throw;
    throw malformed(reports_path, e.what());
  }

  const auto index = triage::load_bug_index(dir / campaign::kBugsDir / "bugs.jsonl");
  const auto timeline_path = dir / campaign::kTimelineFile;
  std::map<std::size_t, std::pair<int, milliseconds>> timeline;
  {
    std::istringstream in(read_file(timeline_path));
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      try {
        const auto j = json::parse(line);
        timeline[j.at("bug_id").get<std::size_t>()] = {
            j.at("iteration").get<int>(), milliseconds(j.at("elapsed_ms").get<std::int64_t>())};
      } catch (const json::exception& e) {
        throw malformed(timeline_path, e.what());
      }
    }
  }
  for (const auto& e : index) {
    auto it = timeline.find(e.bug_id);
    if (it == timeline.end()) {
      throw malformed(timeline_path, "no entry for bug " + std::to_string(e.bug_id));
    }
    a.bugs.push_back(BugSummary{e.bug_id, e.key, e.occurrences, it->second.first,
                                it->second.second});
  }
  a.corpus = corpus::corpus_stats(corpus::load_corpus(dir / campaign::kCorpusDir));
  return a;
}

namespace {

json overlap_json(const OverlapReport& rep) {
  json j;
  j["labels"] = rep.labels;
  j["per_label"] = json::object();
  for (std::size_t i = 0; i < rep.labels.size(); ++i) j["per_label"][rep.labels[i]] = rep.per_label[i];
  auto regions = [](const std::vector<OverlapRegion>& rs) {
    json arr = json::array();
    for (const auto& r : rs) {
      arr.push_back({{"labels", r.labels}, {"size", r.size}, {"trace_keys", r.trace_keys}});
    }
    return arr;
  };
  j["exclusive"] = regions(rep.exclusive);
  j["pairwise"] = regions(rep.pairwise);
  j["union"] = rep.union_size;
  return j;
}

std::set<triage::BugKey> keys_of(const CampaignArtifacts& a) {
  std::set<triage::BugKey> keys;
  for (const auto& b : a.bugs) keys.insert(b.key);
  return keys;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void emit_report(const CampaignArtifacts& main, const std::vector<CampaignArtifacts>& others,
                 const std::filesystem::path& dir, const ReportOptions& options) {
  campaign::IterationReport totals;
  for (const auto& r : main.reports) {
    totals.generated += r.generated;
    totals.compile_valid += r.compile_valid;
    totals.crashes += r.crashes;
    totals.new_bugs += r.new_bugs;
    totals.programs_added += r.programs_added;
    totals.transformed_added += r.transformed_added;
    totals.timeouts += r.timeouts;
    totals.run_errors += r.run_errors;
    totals.elapsed += r.elapsed;
  }

  std::vector<CampaignEvent> events;
  milliseconds cursor{0};
  for (const auto& r : main.reports) {
    cursor += r.elapsed;
    events.push_back({cursor, 0, r.generated});
  }
  for (const auto& b : main.bugs) events.push_back({b.first_seen_elapsed, 1, 0});
  const auto curve = bugs_over_time(events, options.interval, cursor);

  json corpus_json{{"file_count", main.corpus.file_count},
                   {"mean_tokens", main.corpus.mean_tokens_rounded()}};

  json report;
  report["schema_version"] = 1;
  report["label"] = main.label;
  report["mode"] = main.mode;
  report["iterations"] = main.reports.size();
  report["totals"] = {{"generated", totals.generated},
                      {"compile_valid", totals.compile_valid},
                      {"crashes", totals.crashes},
                      {"bugs", main.bugs.size()},
                      {"programs_added", totals.programs_added},
                      {"transformed_added", totals.transformed_added},
                      {"timeouts", totals.timeouts},
                      {"run_errors", totals.run_errors},
                      {"elapsed_ms", totals.elapsed.count()}};
  report["throughput_tests_per_minute"] =
      totals.elapsed.count() > 0 ? json(throughput(main.reports)) : json(nullptr);
  report["validity_rate"] =
      totals.generated > 0 ? json(validity_rate(main.reports)) : json(nullptr);
  report["corpus"] = corpus_json;
  json bugs = json::array();
  for (const auto& b : main.bugs) {
    bugs.push_back({{"bug_id", b.bug_id},
                    {"key_kind", triage::to_string(b.key.kind)},
                    {"key_value", b.key.value},
                    {"low_confidence", b.key.low_confidence},
                    {"occurrences", b.occurrences},
                    {"first_seen_iteration", b.first_seen_iteration},
                    {"first_seen_elapsed_ms", b.first_seen_elapsed.count()}});
  }
  report["bugs"] = bugs;
  json iterations = json::array();
  for (const auto& r : main.reports) iterations.push_back(json::parse(r.to_json()));
  report["per_iteration"] = iterations;
  report["bugs_over_time_interval_ms"] = options.interval.count();
  if (main.coverage) {
    json cov = json::array();
    for (const auto& p : *main.coverage) cov.push_back({{"seconds", p.seconds}, {"percent", p.percent}});
    report["coverage"] = cov;
  }

  json overlap_file = json::object();
  if (!others.empty()) {
    LabeledKeys sets{{main.label, keys_of(main)}};
    for (const auto& o : others) sets.emplace_back(o.label, keys_of(o));
    overlap_file = overlap_json(overlap(sets));
    report["overlap"] = overlap_file;
  }

  std::string csv = "elapsed_seconds,cumulative_bugs,cumulative_tests\n";
  for (const auto& p : curve) {
    csv += fixed(static_cast<double>(p.elapsed.count()) / 1000.0, 3) + "," +
           std::to_string(p.cumulative_bugs) + "," + std::to_string(p.cumulative_tests) + "\n";
  }

  write_file_atomic(dir / "report.json", report.dump(2) + "\n");
  write_file_atomic(dir / "bugs_over_time.csv", csv);
  write_file_atomic(dir / "corpus_stats.json", corpus_json.dump(2) + "\n");
  write_file_atomic(dir / "overlap.json", overlap_file.dump(2) + "\n");
}

}  // namespace adaptfuzz::metrics
