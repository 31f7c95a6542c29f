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

#include "adaptfuzz/generator/generate.hpp"

#include "adaptfuzz/error.hpp"
#include "adaptfuzz/rng.hpp"

namespace adaptfuzz::generator {

using corpus::Provenance;
using corpus::TestProgram;

void GenerationConfig::validate() const {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  }
  if (prefix_len < 1 || prefix_len > token_limit) {
    throw Error(ErrorCode::kInvalidArgument,
                "prefix_len must lie in [1, token_limit]");
  }
  if (candidates_per_seed < 1) {
    throw Error(ErrorCode::kInvalidArgument, "candidates_per_seed must be >= 1");
  }
}

namespace {

void require_prefix(const TestProgram& seed, std::size_t prefix_len) {
  if (seed.tokens().size() < prefix_len) {
    throw Error(ErrorCode::kSeedTooShort,
                "seed " + seed.id() + " has " +
                    std::to_string(seed.tokens().size()) + " tokens, need " +
                    std::to_string(prefix_len));
  }
}

TestProgram continue_seed(const GeneratorBackend& backend,
                          const TestProgram& seed, const GenerationConfig& cfg,
                          double temperature, std::uint64_t stream,
                          std::string id, int iteration) {
  std::span<const corpus::Token> prefix(seed.tokens().data(), cfg.prefix_len);
  SamplingRequest req;
  req.max_new_tokens = cfg.token_limit - cfg.prefix_len;
  req.temperature = temperature;
  req.rng_seed = stream;
  auto tail = backend.continue_program(prefix, req);
  if (tail.size() > req.max_new_tokens) tail.resize(req.max_new_tokens);

  std::vector<corpus::Token> tokens(prefix.begin(), prefix.end());
  tokens.insert(tokens.end(), std::make_move_iterator(tail.begin()),
                std::make_move_iterator(tail.end()));
  auto program = TestProgram::make(std::move(id), std::move(tokens),
                                   Provenance::kGenerated, iteration, seed.id());
  // Canonicalization can only re-split tokens (e.g. a lone quote swallowing
  // what follows); enforce the budget on the stored form too.
  if (program.tokens().size() > cfg.token_limit) {
    std::vector<corpus::Token> capped(
        program.tokens().begin(),
        program.tokens().begin() + static_cast<std::ptrdiff_t>(cfg.token_limit));
    program = TestProgram::make(program.id(), std::move(capped),
                                Provenance::kGenerated, iteration, seed.id());
  }
  return program;
}

}  // namespace

std::vector<TestProgram> generate_candidates(const GeneratorBackend& backend,
                                             const TestProgram& seed,
                                             const GenerationConfig& cfg,
                                             const CandidateNaming& naming) {
  cfg.validate();
  require_prefix(seed, cfg.prefix_len);
  const std::uint64_t seed_hash = fnv1a64(seed.id());
  std::vector<TestProgram> out;
  out.reserve(cfg.candidates_per_seed);
  for (std::size_t r = 1; r <= cfg.candidates_per_seed; ++r) {
    out.push_back(continue_seed(
        backend, seed, cfg, cfg.temperature,
        derive_seed({cfg.rng_seed, seed_hash, r}),
        naming.stem + "-" + std::to_string(r), naming.iteration));
  }
  return out;
}

TestProgram generate_greedy(const GeneratorBackend& backend,
                            const TestProgram& seed,
                            const GenerationConfig& cfg,
                            const CandidateNaming& naming) {
  if (cfg.prefix_len < 1 || cfg.prefix_len > cfg.token_limit) {
    throw Error(ErrorCode::kInvalidArgument,
                "prefix_len must lie in [1, token_limit]");
  }
  require_prefix(seed, cfg.prefix_len);
  return continue_seed(backend, seed, cfg, 0.0, 0, naming.stem + "-1",
                       naming.iteration);
}

}  // namespace adaptfuzz::generator
