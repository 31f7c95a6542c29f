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

#include "adaptfuzz/campaign/campaign.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

#include "adaptfuzz/corpus/layout.hpp"
#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/generator/generate.hpp"
#include "adaptfuzz/generator/ngram.hpp"
#include "adaptfuzz/generator/remote.hpp"
#include "adaptfuzz/triage/bug_key.hpp"

namespace adaptfuzz::campaign {

using corpus::ProgramPtr;
using harness::OutcomeKind;
using nlohmann::json;
using std::chrono::milliseconds;

// ---------------------------------------------------------------------------
// IterationReport

namespace {

json report_json(const IterationReport& r) {
  return json{{"iteration", r.iteration},
              {"seeds_sampled", r.seeds_sampled},
              {"generated", r.generated},
              {"compile_valid", r.compile_valid},
              {"crashes", r.crashes},
              {"new_bugs", r.new_bugs},
              {"programs_added", r.programs_added},
              {"transformed_added", r.transformed_added},
              {"timeouts", r.timeouts},
              {"run_errors", r.run_errors},
              {"corpus_size", r.corpus_size},
              {"elapsed_ms", r.elapsed.count()},
              {"truncated", r.truncated}};
}

IterationReport report_from(const json& j) {
  IterationReport r;
  r.iteration = j.at("iteration").get<int>();
  r.seeds_sampled = j.at("seeds_sampled").get<std::size_t>();
  r.generated = j.at("generated").get<std::size_t>();
  r.compile_valid = j.at("compile_valid").get<std::size_t>();
  r.crashes = j.at("crashes").get<std::size_t>();
  r.new_bugs = j.at("new_bugs").get<std::size_t>();
  r.programs_added = j.at("programs_added").get<std::size_t>();
  r.transformed_added = j.at("transformed_added").get<std::size_t>();
  r.timeouts = j.at("timeouts").get<std::size_t>();
  r.run_errors = j.at("run_errors").get<std::size_t>();
  r.corpus_size = j.at("corpus_size").get<std::size_t>();
  r.elapsed = milliseconds(j.at("elapsed_ms").get<std::int64_t>());
  r.truncated = j.at("truncated").get<bool>();
  return r;
}

}  // namespace

std::string IterationReport::to_json() const { return report_json(*this).dump(); }

IterationReport IterationReport::from_json(std::string_view line) {
  try {
    return report_from(json::parse(line));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput, std::string("iteration report: ") + e.what());
  }
}

std::string reports_to_jsonl(const std::vector<IterationReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += r.to_json() + "\n";
  return out;
}

std::vector<IterationReport> reports_from_jsonl(std::string_view text) {
  std::vector<IterationReport> out;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(IterationReport::from_json(line));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Augmentation

std::size_t augment_training_set(corpus::CorpusStore& corpus,
                                 const std::vector<harness::TransformedProgram>& transformed,
                                 int iteration) {
  std::size_t added = 0;
  for (const auto& t : transformed) {
    auto tokens = corpus::tokenize(t.output_text);
    if (std::all_of(tokens.begin(), tokens.end(),
                    [](const auto& tok) { return corpus::is_newline(tok); })) {
      continue;
    }
    auto program = corpus::TestProgram::make(
        "t" + std::to_string(iteration) + "-" + std::to_string(added + 1),
        std::move(tokens), corpus::Provenance::kTransformed, iteration, t.source_id);
    if (corpus.contains_hash(program.content_hash())) continue;
    if (corpus.add(std::move(program))) ++added;
  }
  return added;
}

// ---------------------------------------------------------------------------
// Per-program examination

namespace {

struct Verdict {
  bool compiled = false;
  struct Crash {
    std::size_t pass_index;
    std::string stderr_text;
    triage::BugKey key;
  };
  std::vector<Crash> crashes;
  std::vector<harness::TransformedProgram> transformed;  // distinct texts
  std::size_t timeouts = 0;
  std::size_t errors = 0;
  milliseconds charged{0};
};

Verdict examine(const harness::CompilerAdapter& compiler, const corpus::TestProgram& q,
                const std::vector<harness::PassSpec>& passes, const CampaignConfig& cfg) {
  Verdict v;
  auto guarded = [&](std::optional<std::string_view> pass)
      -> std::optional<harness::ExecutionOutcome> {
    v.charged += milliseconds(1);
    try {
      auto o = compiler.run(q.text(), pass, cfg.timeout);
      if (o.kind == OutcomeKind::kTimeout) {
        ++v.timeouts;
        v.charged += cfg.timeout;
      }
      return o;
    } catch (const std::exception&) {
      ++v.errors;
      return std::nullopt;
    }
  };

  const auto check = guarded(std::nullopt);
  if (!check || check->kind != OutcomeKind::kValid) return v;
  v.compiled = true;

  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < passes.size(); ++i) {
    auto o = guarded(passes[i].flag);
    if (!o) continue;
    if (o->kind == OutcomeKind::kCrash) {
      auto key = triage::bug_key_for(o->stderr_text, cfg.frame_prefixes);
      if (o->stderr_text.empty()) o->stderr_text = "<no stderr>\n";
      v.crashes.push_back({i, std::move(o->stderr_text), std::move(key)});
    } else if (o->kind == OutcomeKind::kValid && !o->stdout_text.empty()) {
      if (seen.insert(o->stdout_text).second) {
        v.transformed.push_back({q.id(), passes[i].flag, std::move(o->stdout_text)});
      }
    }
  }
  return v;
}

constexpr const char* kCheckpointFiles[] = {"corpus.manifest", "model.snap",
                                            "registry.jsonl", "rng.state"};

[[noreturn]] void corrupt(const std::filesystem::path& dir, const std::string& why) {
  throw Error(ErrorCode::kCorruptCheckpoint, dir.string() + ": " + why);
}

std::string model_snapshot(const generator::BackendPtr& model) {
  if (!model) return "";
  if (const auto* ng = dynamic_cast<const generator::NGramModel*>(model.get())) {
    return ng->to_snapshot();
  }
  if (const auto* http = dynamic_cast<const generator::HttpBackend*>(model.get())) {
    return json{{"format", "remote"}, {"endpoint", http->endpoint().to_string()}}.dump();
  }
  return json{{"format", "opaque"}}.dump();
}

}  // namespace

// ---------------------------------------------------------------------------
// Campaign

std::string checkpoint_name(int iteration) { return "iter_" + std::to_string(iteration); }

Campaign::Campaign(CampaignConfig cfg, const harness::CompilerAdapter& compiler,
                   generator::BackendPtr backend, std::vector<harness::PassSpec> passes)
    : cfg_(std::move(cfg)),
      compiler_(&compiler),
      prototype_(std::move(backend)),
      passes_(std::move(passes)),
      wall_start_(std::chrono::steady_clock::now()) {
  cfg_.validate();
  if (!prototype_) throw Error(ErrorCode::kConfigInvalid, "backend: none given");
}

Campaign::Campaign(CampaignConfig cfg, const corpus::CorpusStore& seeds,
                   const harness::CompilerAdapter& compiler, generator::BackendPtr backend,
                   std::vector<harness::PassSpec> passes)
    : Campaign(std::move(cfg), compiler, std::move(backend), std::move(passes)) {
  if (seeds.empty()) throw Error(ErrorCode::kEmptyCorpus, "campaign: no seed programs");
  state_.corpus = seeds;
  state_.rng = Rng(derive_seed({cfg_.rng_seed, 0x63616d70u}));
  if (cfg_.clock == ClockKind::kWall) state_.origin = stamp();
}

milliseconds Campaign::now() const {
  if (cfg_.clock == ClockKind::kLogical) return state_.clock;
  return clock_base_ + std::chrono::duration_cast<milliseconds>(
                           std::chrono::steady_clock::now() - wall_start_);
}

triage::Timestamp Campaign::stamp() const {
  if (cfg_.clock == ClockKind::kLogical) return triage::Timestamp(state_.clock);
  return std::chrono::floor<milliseconds>(std::chrono::system_clock::now());
}

bool Campaign::budget_exhausted() const {
  return cfg_.wall_clock_budget && now() >= *cfg_.wall_clock_budget;
}

bool Campaign::finished() const {
  return state_.iteration >= cfg_.max_iterations || budget_exhausted();
}

IterationReport Campaign::run_iteration() {
  const auto started = now();
  const auto eff = cfg_.effective();
  IterationReport rep;
  rep.iteration = state_.iteration + 1;
  const int iter = rep.iteration;

  // Training. The no-augmentation ablation fits once and keeps that model.
  if (!state_.model || cfg_.mode != Mode::kNoAugmentationAblation) {
    const auto entries = state_.corpus.entries();
    state_.model = prototype_->train(entries, cfg_.epochs).backend;
  }
  const auto& model = *state_.model;

  const std::uint64_t sample_seed = state_.rng.next();
  const std::uint64_t gen_seed = state_.rng.next();
  const auto fuzz_seeds =
      corpus::sample_fuzz_seeds(state_.corpus, cfg_.max_seed_samples, sample_seed);
  rep.seeds_sampled = fuzz_seeds.size();

  // Generation, one slot per seed so the output order is fixed.
  const auto gcfg = cfg_.generation(gen_seed);
  std::vector<std::vector<corpus::TestProgram>> per_seed(fuzz_seeds.size());
  harness::parallel_for(fuzz_seeds.size(), cfg_.worker_pool_width, [&](std::size_t j) {
    const generator::CandidateNaming naming{
        "g" + std::to_string(iter) + "-" + std::to_string(j + 1), iter};
    try {
      if (cfg_.mode == Mode::kGreedyAblation) {
        per_seed[j].push_back(generator::generate_greedy(model, *fuzz_seeds[j], gcfg, naming));
      } else {
        per_seed[j] = generator::generate_candidates(model, *fuzz_seeds[j], gcfg, naming);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSeedTooShort) throw;
    }
  });
  std::vector<ProgramPtr> generated;
  for (auto& batch : per_seed) {
    for (auto& p : batch) {
      generated.push_back(std::make_shared<const corpus::TestProgram>(std::move(p)));
    }
  }
  per_seed.clear();
  rep.generated = generated.size();

  // Compile check and pass sweep, in batches so the budget is honored.
  std::vector<bool> compiled(generated.size(), false);
  std::vector<ProgramPtr> valid;
  std::vector<harness::TransformedProgram> transformed;
  for (std::size_t b = 0; b < generated.size(); b += eff.sweep_batch) {
    if (budget_exhausted()) {
      rep.truncated = true;
      break;
    }
    const std::size_t e = std::min(generated.size(), b + eff.sweep_batch);
    std::vector<Verdict> verdicts(e - b);
    harness::parallel_for(e - b, cfg_.worker_pool_width, [&](std::size_t i) {
      verdicts[i] = examine(*compiler_, *generated[b + i], passes_, cfg_);
    });
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      auto& v = verdicts[i];
      const auto& q = generated[b + i];
      if (cfg_.clock == ClockKind::kLogical) state_.clock += v.charged;
      rep.timeouts += v.timeouts;
      rep.run_errors += v.errors;
      if (!v.compiled) continue;
      compiled[b + i] = true;
      ++rep.compile_valid;
      valid.push_back(q);
      for (auto& c : v.crashes) {
        ++rep.crashes;
        triage::CrashRecord rec{q->id(),           passes_[c.pass_index].flag,
                                std::move(c.key),  std::move(c.stderr_text),
                                q->text(),         stamp(),
                                iter};
        if (state_.registry.register_crash(std::move(rec)) ==
            triage::RegisterResult::kNewBug) {
          ++rep.new_bugs;
        }
      }
      for (auto& t : v.transformed) transformed.push_back(std::move(t));
    }
  }
  if (observer_) observer_(iter, generated, compiled);

  // Diversity augmentation.
  if (cfg_.mode != Mode::kNoAugmentationAblation) {
    for (const auto& q : valid) {
      if (state_.corpus.add(*q)) ++rep.programs_added;
    }
    rep.transformed_added = augment_training_set(state_.corpus, transformed, iter);
  }

  rep.corpus_size = state_.corpus.size();
  const auto finished_at = now();
  rep.elapsed = finished_at - started;
  state_.clock = finished_at;
  state_.iteration = iter;
  state_.reports.push_back(rep);
  return rep;
}

const CampaignState& Campaign::run(const std::optional<std::filesystem::path>& checkpoint_root) {
  while (!finished()) {
    run_iteration();
    if (checkpoint_root) write_checkpoint(*checkpoint_root / checkpoint_name(state_.iteration));
  }
  return state_;
}

void Campaign::write_checkpoint(const std::filesystem::path& dir) const {
  const std::string contents[] = {corpus::serialize_snapshot(state_.corpus),
                                  model_snapshot(state_.model), state_.registry.to_jsonl(),
                                  state_.rng.save_state()};
  json hashes = json::object();
  for (std::size_t i = 0; i < std::size(kCheckpointFiles); ++i) {
    write_file_atomic(dir / kCheckpointFiles[i], contents[i]);
    hashes[kCheckpointFiles[i]] = sha256_hex(contents[i]);
  }
  json reports = json::array();
  for (const auto& r : state_.reports) reports.push_back(report_json(r));
  json meta{{"iteration", state_.iteration},
            {"clock_ms", state_.clock.count()},
            {"origin_ms", state_.origin.time_since_epoch().count()},
            {"config", json::parse(cfg_.to_json())},
            {"reports", reports},
            {"sha256", hashes}};
  write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
}

Campaign Campaign::resume(const std::filesystem::path& dir, CampaignConfig cfg,
                          const harness::CompilerAdapter& compiler,
                          generator::BackendPtr backend,
                          std::vector<harness::PassSpec> passes) {
  Campaign c(std::move(cfg), compiler, std::move(backend), std::move(passes));
  json meta;
  std::string contents[std::size(kCheckpointFiles)];
  try {
    meta = json::parse(read_file(dir / "meta.json"));
    for (std::size_t i = 0; i < std::size(kCheckpointFiles); ++i) {
      contents[i] = read_file(dir / kCheckpointFiles[i]);
      if (sha256_hex(contents[i]) != meta.at("sha256").at(kCheckpointFiles[i]).get<std::string>()) {
        corrupt(dir, std::string(kCheckpointFiles[i]) + " does not match its recorded hash");
      }
    }
    auto& st = c.state_;
    st.iteration = meta.at("iteration").get<int>();
    st.clock = milliseconds(meta.at("clock_ms").get<std::int64_t>());
    st.origin = triage::Timestamp(milliseconds(meta.at("origin_ms").get<std::int64_t>()));
    for (const auto& r : meta.at("reports")) st.reports.push_back(report_from(r));
    st.corpus = corpus::parse_snapshot(contents[0]);
    st.registry = triage::BugRegistry::from_jsonl(contents[2]);
    st.rng.restore_state(contents[3]);
    if (!contents[1].empty()) {
      const auto snap = json::parse(contents[1]);
      if (snap.value("format", "") == "remote" || snap.value("format", "") == "opaque") {
        // Remote servers keep their own weights; the prototype is the model.
        st.model = c.prototype_;
      } else {
        st.model = std::make_shared<const generator::NGramModel>(
            generator::NGramModel::from_snapshot(contents[1]));
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptCheckpoint) throw;
    corrupt(dir, e.what());
  } catch (const json::exception& e) {
    corrupt(dir, e.what());
  }
  if (c.state_.corpus.empty()) corrupt(dir, "empty corpus");
  c.clock_base_ = c.state_.clock;
  c.wall_start_ = std::chrono::steady_clock::now();
  return c;
}

void write_campaign_outputs(const CampaignState& state, const CampaignConfig& cfg,
                            const std::filesystem::path& out_dir) {
  write_file_atomic(out_dir / kConfigFile, cfg.to_json());
  write_file_atomic(out_dir / kReportsFile, reports_to_jsonl(state.reports));
  std::string timeline;
  for (const auto& bucket : state.registry.buckets()) {
    const auto& first = bucket.records.front();
    timeline += json{{"bug_id", bucket.bug_id},
                     {"iteration", first.iteration},
                     {"elapsed_ms", (first.first_seen - state.origin).count()}}
                    .dump();
    timeline.push_back('\n');
  }
  write_file_atomic(out_dir / kTimelineFile, timeline);
  corpus::save_corpus(state.corpus, out_dir / kCorpusDir);
  triage::export_registry(state.registry, out_dir / kBugsDir);
}

CampaignState run_campaign(const CampaignConfig& cfg, const corpus::CorpusStore& seeds,
                           const harness::CompilerAdapter& compiler,
                           generator::BackendPtr backend,
                           std::vector<harness::PassSpec> passes,
                           const std::optional<std::filesystem::path>& checkpoint_root) {
  Campaign c(cfg, seeds, compiler, std::move(backend), std::move(passes));
  c.run(checkpoint_root);
  return c.state();
}

}  // namespace adaptfuzz::campaign
