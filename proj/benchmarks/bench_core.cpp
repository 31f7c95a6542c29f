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

#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>

#include "adaptfuzz/corpus/seed_split.hpp"
#include "adaptfuzz/corpus/store.hpp"
#include "adaptfuzz/corpus/tokenizer.hpp"
#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/generator/generate.hpp"
#include "adaptfuzz/generator/ngram.hpp"
#include "adaptfuzz/harness/faultline.hpp"
#include "adaptfuzz/harness/pass_list.hpp"
#include "adaptfuzz/harness/sweep.hpp"
#include "adaptfuzz/triage/bug_key.hpp"

namespace {

namespace fs = std::filesystem;
using namespace adaptfuzz;

const fs::path kFixtures = ADAPTFUZZ_FIXTURE_DIR;

std::string all_fixture_text() {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(kFixtures / "mlir")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string text;
  for (const auto& f : files) text += read_file(f) + "\n";
  return text;
}

const corpus::CorpusStore& fixture_corpus() {
  static const corpus::CorpusStore store = [] {
    corpus::CorpusStore s;
    for (auto& u : corpus::split_seed_file(all_fixture_text()).units) s.add(std::move(u.program));
    return s;
  }();
  return store;
}

void BM_Tokenize(benchmark::State& state) {
  const auto text = all_fixture_text();
  for (auto _ : state) benchmark::DoNotOptimize(corpus::tokenize(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_SeedSplit(benchmark::State& state) {
  const auto text = all_fixture_text();
  for (auto _ : state) benchmark::DoNotOptimize(corpus::split_seed_file(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_SeedSplit);

void BM_NGramFit(benchmark::State& state) {
  const auto programs = fixture_corpus().entries();
  for (auto _ : state) {
    benchmark::DoNotOptimize(generator::NGramModel::fit(programs, 1, {}));
  }
}
BENCHMARK(BM_NGramFit)->Unit(benchmark::kMillisecond);

void BM_GenerateCandidates(benchmark::State& state) {
  const auto programs = fixture_corpus().entries();
  const auto model = generator::NGramModel::fit(programs, 1, {});
  generator::GenerationConfig cfg;
  cfg.token_limit = static_cast<std::size_t>(state.range(0));
  std::size_t tokens = 0;
  for (auto _ : state) {
    ++cfg.rng_seed;
    for (const auto& q : generator::generate_candidates(
             model, *programs[cfg.rng_seed % programs.size()], cfg, {"b", 1})) {
      tokens += q.tokens().size();
    }
  }
  state.counters["tokens/s"] = benchmark::Counter(static_cast<double>(tokens),
                                                  benchmark::Counter::kIsRate);
}
BENCHMARK(BM_GenerateCandidates)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_FaultlineSweep(benchmark::State& state) {
  const auto passes = harness::load_pass_list(kFixtures / "passes_237.txt");
  std::vector<corpus::Token> pool;
  for (const auto& p : fixture_corpus().entries()) {
    pool.insert(pool.end(), p->tokens().begin(), p->tokens().end());
  }
  harness::FaultlineGenOptions fo;
  const harness::FaultlineCompiler compiler(harness::random_faultline_spec(pool, passes, fo));
  const auto& q = *fixture_corpus().entries()[0];
  const auto width = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(harness::sweep(compiler, q, passes, harness::kDefaultTimeout, width));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * (passes.size() + 1)));
}
BENCHMARK(BM_FaultlineSweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_BugKey(benchmark::State& state) {
  std::string log = "PLEASE submit a bug report\nStack dump:\n";
  for (int i = 0; i < 40; ++i) {
    log += "#" + std::to_string(i) + " 0x00005555" + std::to_string(1000 + i) + " " +
           (i % 3 ? "llvm::detail::f" : "mlir::Pass::run") + std::to_string(i) +
           "() /src/lib/File.cpp:" + std::to_string(10 * i) + "\n";
  }
  const auto trace_only = log;
  log += "mlir-opt: lib/IR/Value.cpp:42: Assertion `impl && \"null value\"' failed.\n";
  for (auto _ : state) {
    benchmark::DoNotOptimize(triage::bug_key_for(state.range(0) ? log : trace_only));
  }
}
BENCHMARK(BM_BugKey)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
