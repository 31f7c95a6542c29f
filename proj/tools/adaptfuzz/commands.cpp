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

#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "adaptfuzz/campaign/campaign.hpp"
#include "adaptfuzz/campaign/config.hpp"
#include "adaptfuzz/corpus/layout.hpp"
#include "adaptfuzz/corpus/seed_split.hpp"
#include "adaptfuzz/corpus/store.hpp"
#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/generator/generate.hpp"
#include "adaptfuzz/generator/ngram.hpp"
#include "adaptfuzz/generator/remote.hpp"
#include "adaptfuzz/harness/faultline.hpp"
#include "adaptfuzz/harness/pass_list.hpp"
#include "adaptfuzz/harness/sweep.hpp"
#include "adaptfuzz/metrics/metrics.hpp"
#include "adaptfuzz/rng.hpp"
#include "adaptfuzz/triage/bug_key.hpp"
#include "adaptfuzz/triage/registry.hpp"

namespace adaptfuzz::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  return read_file(path);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file_atomic(path, text);
  }
}

std::vector<fs::path> collect_mlir(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      for (auto it = fs::recursive_directory_iterator(in, ec);
           it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) break;
        if (it->is_regular_file() && it->path().extension() == ".mlir") {
          files.push_back(it->path());
        }
      }
      if (ec) throw Error(ErrorCode::kIoFailure, in + ": " + ec.message());
    } else if (fs::is_regular_file(in, ec)) {
      files.emplace_back(in);
    } else {
      throw Error(ErrorCode::kIoFailure, in + ": no such file or directory");
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// "faultline:<spec.json>" or "exec:<binary>"; a bare path means exec.
std::unique_ptr<harness::CompilerAdapter> make_compiler(
    const std::string& spec, const std::vector<std::string>& leading_args) {
  constexpr std::string_view kFaultline = "faultline:";
  constexpr std::string_view kExec = "exec:";
  if (spec.rfind(kFaultline, 0) == 0) {
    return std::make_unique<harness::FaultlineCompiler>(
        harness::FaultlineSpec::load(spec.substr(kFaultline.size())));
  }
  harness::ProcessCompilerConfig pc;
  pc.binary = spec.rfind(kExec, 0) == 0 ? spec.substr(kExec.size()) : spec;
  pc.leading_args = leading_args;
  return std::make_unique<harness::ProcessCompiler>(std::move(pc));
}

// "ngram" (untrained prototype), "http:<url>", or a model snapshot path.
generator::BackendPtr make_backend(const std::string& spec, std::size_t order,
                                   std::uint64_t seed) {
  if (spec == "ngram") {
    generator::NGramOptions opts;
    opts.order = order;
    opts.rng_seed = seed;
    return std::make_shared<const generator::NGramModel>(opts);
  }
  if (spec.rfind("http:", 0) == 0 || spec.rfind("http://", 0) == 0) {
    const auto url = spec.rfind("http://", 0) == 0 ? spec : spec.substr(5);
    return std::make_shared<const generator::HttpBackend>(generator::Endpoint::parse(url));
  }
  return std::make_shared<const generator::NGramModel>(
      generator::NGramModel::from_snapshot(read_file(spec)));
}

bool is_seed_too_short(const Error& e) { return e.code() == ErrorCode::kSeedTooShort; }

}  // namespace

struct Commands::State {
  CLI::App* seed_split = nullptr;
  CLI::App* train = nullptr;
  CLI::App* generate = nullptr;
  CLI::App* sweep = nullptr;
  CLI::App* campaign = nullptr;
  CLI::App* triage = nullptr;
  CLI::App* report = nullptr;
  CLI::App* faultline_gen = nullptr;
  CLI::App* serve = nullptr;

  // shared
  std::vector<std::string> inputs;
  std::string out;
  std::string corpus_dir;
  std::string passes_file;
  std::string compiler_spec;
  std::vector<std::string> compiler_args;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double timeout_s = 10.0;

  // train / serve
  int epochs = 5;
  std::size_t order = 4;
  double heldout = 0.1;
  std::string model;
  std::string host = "127.0.0.1";
  int port = 8080;

  // generate
  std::string backend = "ngram";
  double temperature = 1.0;
  std::size_t prefix_len = 3;
  std::size_t candidates = 4;
  std::size_t token_limit = 600;
  std::size_t max_seeds = 35'000;
  bool greedy = false;

  // campaign
  std::string config_file;
  std::string resume_dir;
  std::string seeds_dir;
  std::map<std::string, std::string> overrides;
  std::map<std::string, CLI::Option*> override_opts;
  CLI::Option* workers_opt = nullptr;
  bool no_report = false;

  // report
  std::vector<std::string> compare;
  std::string coverage_csv;
  double interval_s = 3600.0;

  // faultline-gen
  harness::FaultlineGenOptions gen;

  int run_seed_split();
  int run_train();
  int run_generate();
  int run_sweep();
  int run_campaign();
  int run_triage();
  int run_report();
  int run_faultline_gen();
  int run_serve();
};

Commands::Commands(CLI::App& app) : state_(std::make_unique<State>()) {
  auto& s = *state_;

  s.seed_split = app.add_subcommand("seed-split", "split .mlir files into a seed corpus");
  s.seed_split->add_option("inputs,--in", s.inputs, "files or directories")->required();
  s.seed_split->add_option("-o,--out", s.out, "corpus directory")->required();

  s.train = app.add_subcommand("train", "fit an n-gram model on a corpus");
  s.train->add_option("--corpus", s.corpus_dir)->required();
  s.train->add_option("-o,--out", s.out, "model snapshot path")->required();
  s.train->add_option("--epochs", s.epochs)->check(CLI::PositiveNumber);
  s.train->add_option("--order", s.order)->check(CLI::PositiveNumber);
  s.train->add_option("--heldout", s.heldout)->check(CLI::Range(0.0, 0.9));
  s.train->add_option("--seed", s.seed);

  s.generate = app.add_subcommand("generate", "generate candidates from sampled seeds");
  s.generate->add_option("--corpus", s.corpus_dir)->required();
  s.generate->add_option("--model", s.backend, "snapshot path or http:URL")->required();
  s.generate->add_option("-o,--out", s.out, "output corpus directory")->required();
  s.generate->add_option("--temperature", s.temperature);
  s.generate->add_option("--prefix-len", s.prefix_len);
  s.generate->add_option("--candidates", s.candidates);
  s.generate->add_option("--token-limit", s.token_limit);
  s.generate->add_option("--max-seeds", s.max_seeds);
  s.generate->add_option("--seed", s.seed);
  s.generate->add_flag("--greedy", s.greedy, "prefix 10, one argmax candidate");

  s.sweep = app.add_subcommand("sweep", "compile-check a corpus and run every pass");
  s.sweep->add_option("--corpus", s.corpus_dir)->required();
  s.sweep->add_option("--passes", s.passes_file)->required();
  s.sweep->add_option("--compiler", s.compiler_spec, "faultline:SPEC | exec:PATH")->required();
  s.sweep->add_option("--compiler-arg", s.compiler_args);
  s.sweep->add_option("--timeout", s.timeout_s, "seconds")->check(CLI::PositiveNumber);
  s.sweep->add_option("--workers", s.workers)->check(CLI::PositiveNumber);
  s.sweep->add_option("-o,--out", s.out, "bug export directory");

  s.campaign = app.add_subcommand("campaign", "run the fuzzing loop");
  s.campaign->add_option("--config", s.config_file, "JSON file or -");
  s.campaign->add_option("--compiler", s.compiler_spec, "faultline:SPEC | exec:PATH")->required();
  s.campaign->add_option("--compiler-arg", s.compiler_args);
  s.campaign->add_option("--backend", s.backend, "ngram | http:URL");
  s.campaign->add_option("--seeds", s.seeds_dir, "seed corpus directory");
  s.campaign->add_option("--passes", s.passes_file)->required();
  s.campaign->add_option("-o,--out", s.out)->required();
  s.workers_opt = s.campaign->add_option("--workers", s.workers)->check(CLI::PositiveNumber);
  s.campaign->add_option("--resume", s.resume_dir, "checkpoint directory");
  s.campaign->add_flag("--no-report", s.no_report);
  const auto defaults = json::parse(campaign::CampaignConfig{}.to_json());
  for (const auto& [key, _] : defaults.items()) {
    std::string names = "--" + key;
    if (key.find('_') != std::string::npos) {
      auto dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      names += ",--" + dashed;
    }
    s.override_opts[key] = s.campaign->add_option(names, s.overrides[key], "config override");
  }
  s.campaign->callback([&s] {
    if (s.resume_dir.empty() && s.seeds_dir.empty()) {
      throw CLI::RequiredError("--seeds (or --resume)");
    }
  });

  s.triage = app.add_subcommand("triage", "print the bug key for crash logs");
  s.triage->add_option("inputs", s.inputs, "stderr files, - for stdin")->required();

  s.report = app.add_subcommand("report", "summarize campaign output directories");
  s.report->add_option("campaign", s.corpus_dir, "campaign output directory")->required();
  s.report->add_option("--compare", s.compare, "other campaign directories");
  s.report->add_option("--coverage", s.coverage_csv, "timestamp,percent CSV");
  s.report->add_option("--interval", s.interval_s, "seconds")->check(CLI::PositiveNumber);
  s.report->add_option("-o,--out", s.out)->required();

  s.faultline_gen = app.add_subcommand("faultline-gen", "draw a random faultline spec");
  s.faultline_gen->add_option("--corpus", s.corpus_dir)->required();
  s.faultline_gen->add_option("--passes", s.passes_file)->required();
  s.faultline_gen->add_option("--seed", s.gen.rng_seed);
  s.faultline_gen->add_option("--faults", s.gen.fault_count);
  s.faultline_gen->add_option("--rewrites", s.gen.rewrite_count);
  s.faultline_gen->add_option("--hangs", s.gen.hang_count);
  s.faultline_gen->add_option("--rewrite-trigger-fraction", s.gen.rewrite_trigger_fraction)
      ->check(CLI::Range(0.0, 1.0));
  s.faultline_gen->add_option("--shared-signature-rate", s.gen.shared_signature_rate)
      ->check(CLI::Range(0.0, 1.0));
  s.faultline_gen->add_option("-o,--out", s.out, "spec path, default stdout");

  s.serve = app.add_subcommand("serve", "serve an n-gram model over the wire protocol");
  auto* model = s.serve->add_option("--model", s.model, "snapshot path");
  auto* corpus = s.serve->add_option("--corpus", s.corpus_dir, "train on this corpus");
  model->excludes(corpus);
  s.serve->add_option("--epochs", s.epochs)->check(CLI::PositiveNumber);
  s.serve->add_option("--order", s.order)->check(CLI::PositiveNumber);
  s.serve->add_option("--host", s.host);
  s.serve->add_option("--port", s.port)->check(CLI::Range(0, 65535));
}

Commands::~Commands() = default;

int Commands::run() {
  auto& s = *state_;
  if (s.seed_split->parsed()) return s.run_seed_split();
  if (s.train->parsed()) return s.run_train();
  if (s.generate->parsed()) return s.run_generate();
  if (s.sweep->parsed()) return s.run_sweep();
  if (s.campaign->parsed()) return s.run_campaign();
  if (s.triage->parsed()) return s.run_triage();
  if (s.report->parsed()) return s.run_report();
  if (s.faultline_gen->parsed()) return s.run_faultline_gen();
  if (s.serve->parsed()) return s.run_serve();
  return 1;
}

int Commands::State::run_seed_split() {
  corpus::CorpusStore store;
  std::size_t units = 0;
  for (const auto& file : collect_mlir(inputs)) {
    const auto split = corpus::split_seed_file(read_file(file));
    if (split.unbalanced) {
      std::cerr << "warning: " << file.string() << ":" << split.unbalanced->line
                << ": unbalanced delimiters, rest of file skipped\n";
    }
    for (auto& p : split.programs()) {
      ++units;
      store.add(std::move(p));
    }
  }
  corpus::save_corpus(store, out);
  std::cout << units << " units, " << store.size() << " distinct programs\n";
  return 0;
}

int Commands::State::run_train() {
  const auto store = corpus::load_corpus(corpus_dir);
  const auto entries = store.entries();
  generator::NGramOptions opts;
  opts.order = order;
  opts.rng_seed = seed;
  opts.heldout_fraction = heldout;
  generator::NGramTrainingReport rep;
  const auto model = generator::NGramModel::fit(entries, epochs, opts, &rep);
  write_file_atomic(out, model.to_snapshot());
  std::printf("programs %zu heldout %zu vocab %zu\n", entries.size(), rep.heldout_programs,
              model.vocab().size());
  std::printf("epoch 0 heldout_nll %.6f\n", rep.initial_heldout_nll);
  for (std::size_t i = 0; i < rep.heldout_nll_by_epoch.size(); ++i) {
    std::printf("epoch %zu heldout_nll %.6f\n", i + 1, rep.heldout_nll_by_epoch[i]);
  }
  return 0;
}

int Commands::State::run_generate() {
  const auto store = corpus::load_corpus(corpus_dir);
  const auto backend_ptr = make_backend(backend, order, seed);
  generator::GenerationConfig cfg;
  cfg.temperature = temperature;
  cfg.prefix_len = greedy ? generator::kGreedyPrefixLen : prefix_len;
  cfg.candidates_per_seed = greedy ? 1 : candidates;
  cfg.token_limit = token_limit;
  cfg.validate();

  corpus::CorpusStore generated;
  std::size_t skipped = 0;
  const auto seeds = corpus::sample_fuzz_seeds(store, max_seeds, derive_seed({seed, 1}));
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    cfg.rng_seed = derive_seed({seed, 2, j});
    const generator::CandidateNaming naming{"g1-" + std::to_string(j + 1), 1};
    try {
      if (greedy) {
        generated.add(generator::generate_greedy(*backend_ptr, *seeds[j], cfg, naming));
      } else {
        for (auto& p : generator::generate_candidates(*backend_ptr, *seeds[j], cfg, naming)) {
          generated.add(std::move(p));
        }
      }
    } catch (const Error& e) {
      if (!is_seed_too_short(e)) throw;
      ++skipped;
    }
  }
  corpus::save_corpus(generated, out);
  std::cout << seeds.size() << " seeds, " << generated.size() << " distinct programs, "
            << skipped << " seeds too short\n";
  return 0;
}

int Commands::State::run_sweep() {
  const auto store = corpus::load_corpus(corpus_dir);
  const auto passes = harness::load_pass_list(passes_file);
  const auto compiler = make_compiler(compiler_spec, compiler_args);
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));

  triage::BugRegistry registry;
  std::size_t valid = 0, crashes = 0;
  for (const auto& q : store.entries()) {
    const auto r = harness::sweep(*compiler, *q, passes, timeout, workers);
    std::size_t local = 0;
    for (const auto& po : r.passes) {
      if (po.outcome.kind != harness::OutcomeKind::kCrash) continue;
      ++local;
      triage::CrashRecord rec;
      rec.program_id = q->id();
      rec.pass_flag = po.pass->flag;
      rec.bug_key = triage::bug_key_for(po.outcome.stderr_text);
      rec.stderr_text = po.outcome.stderr_text;
      rec.program_text = q->text();
      rec.first_seen = std::chrono::time_point_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now());
      registry.register_crash(std::move(rec));
    }
    valid += r.compiled();
    crashes += local;
    std::cout << q->id() << "\t" << harness::to_string(r.compile.kind) << "\t" << local
              << " crashes\t" << r.transformed.size() << " transformed\n";
  }
  if (!out.empty()) triage::export_registry(registry, out);
  std::cout << store.size() << " programs, " << valid << " valid, " << crashes
            << " crashes, " << registry.bug_count() << " distinct bugs\n";
  return 0;
}

int Commands::State::run_campaign() {
  campaign::CampaignConfig cfg;
  if (!config_file.empty()) {
    cfg = campaign::CampaignConfig::from_json(read_input(config_file));
  } else if (!resume_dir.empty()) {
    json meta;
    try {
      meta = json::parse(read_file(fs::path(resume_dir) / "meta.json"));
      cfg = campaign::CampaignConfig::from_json(meta.at("config").dump());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorruptCheckpoint, resume_dir + ": " + e.what());
    }
  }
  std::map<std::string, std::string> set;
  for (const auto& [key, opt] : override_opts) {
    if (opt->count() > 0) set[key] = overrides[key];
  }
  if (workers_opt->count() > 0) set["worker_pool_width"] = std::to_string(workers);
  cfg.apply_overrides(set);
  cfg.validate();

  const auto passes = harness::load_pass_list(passes_file);
  const auto compiler = make_compiler(compiler_spec, compiler_args);
  const auto proto = make_backend(backend, cfg.ngram_order, cfg.rng_seed);
  const fs::path out_dir(out);
  const auto checkpoints = out_dir / campaign::kCheckpointsDir;

  auto c = resume_dir.empty()
               ? campaign::Campaign(cfg, corpus::load_corpus(seeds_dir), *compiler, proto,
                                    passes)
               : campaign::Campaign::resume(resume_dir, cfg, *compiler, proto, passes);
  const auto& state = c.run(checkpoints);
  campaign::write_campaign_outputs(state, cfg, out_dir);
  if (!no_report) {
    metrics::emit_report(metrics::artifacts_from_state(state, cfg), {}, out_dir / "report");
  }

  std::size_t generated = 0, valid = 0;
  for (const auto& r : state.reports) {
    generated += r.generated;
    valid += r.compile_valid;
  }
  std::cout << "mode " << campaign::to_string(cfg.mode) << ", iterations " << state.iteration
            << ", generated " << generated << ", valid " << valid << ", bugs "
            << state.registry.bug_count() << ", corpus " << state.corpus.size() << "\n";
  return 0;
}

int Commands::State::run_triage() {
  for (const auto& in : inputs) {
    const auto key = triage::bug_key_for(read_input(in));
    std::cout << in << "\t" << triage::to_string(key.kind)
              << (key.low_confidence ? "\tlow-confidence" : "") << "\t" << key.value << "\n";
  }
  return 0;
}

int Commands::State::run_report() {
  auto main = metrics::load_artifacts(corpus_dir);
  if (!coverage_csv.empty()) main.coverage = metrics::ingest_coverage_summary(coverage_csv);
  std::vector<metrics::CampaignArtifacts> others;
  for (const auto& dir : compare) others.push_back(metrics::load_artifacts(dir));
  metrics::ReportOptions opts;
  opts.interval = std::chrono::milliseconds(static_cast<long long>(interval_s * 1000));
  metrics::emit_report(main, others, out, opts);
  std::cout << "wrote " << (fs::path(out) / "report.json").string() << "\n";
  return 0;
}

int Commands::State::run_faultline_gen() {
  const auto store = corpus::load_corpus(corpus_dir);
  std::vector<corpus::Token> pool;
  for (const auto& p : store.entries()) {
    pool.insert(pool.end(), p->tokens().begin(), p->tokens().end());
  }
  const auto spec =
      harness::random_faultline_spec(pool, harness::load_pass_list(passes_file), gen);
  write_output(out, spec.to_json() + "\n");
  return 0;
}

int Commands::State::run_serve() {
  generator::BackendPtr backend_ptr;
  if (!model.empty()) {
    backend_ptr = std::make_shared<const generator::NGramModel>(
        generator::NGramModel::from_snapshot(read_file(model)));
  } else {
    generator::NGramOptions opts;
    opts.order = order;
    auto proto = std::make_shared<const generator::NGramModel>(opts);
    if (!corpus_dir.empty()) {
      const auto store = corpus::load_corpus(corpus_dir);
      const auto entries = store.entries();
      backend_ptr = proto->train(entries, epochs).backend;
    } else {
      backend_ptr = proto;
    }
  }
  generator::WireServer server(backend_ptr);
  std::cerr << "serving on " << host << ":" << port << "\n";
  server.listen_blocking(host, port);
  return 0;
}

}  // namespace adaptfuzz::cli
