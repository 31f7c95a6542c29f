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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adaptfuzz/corpus/program.hpp"
#include "adaptfuzz/generator/backend.hpp"

namespace adaptfuzz::generator {

struct GenerationConfig {
  double temperature = 1.0;
  std::size_t prefix_len = 3;
  std::size_t candidates_per_seed = 4;
  std::size_t token_limit = 600;
  std::uint64_t rng_seed = 0;

  /// Throws Error(kInvalidArgument) unless temperature > 0,
  /// 1 <= prefix_len <= token_limit and candidates_per_seed >= 1.
  void validate() const;
};

/// Where generated programs get their identity. Candidate r of a seed is
/// named "<stem>-<r>" with r counted from 1.
struct CandidateNaming {
  std::string stem;
  int iteration = 1;
};

/// Perturbed generation: cfg.candidates_per_seed programs, each starting with
/// the seed's first cfg.prefix_len tokens and continued by sampling at
/// cfg.temperature until end of program or cfg.token_limit total tokens.
/// Candidate r samples from its own stream derived from
/// (cfg.rng_seed, seed id, r). Throws Error(kSeedTooShort).
std::vector<corpus::TestProgram> generate_candidates(
    const GeneratorBackend& backend, const corpus::TestProgram& seed,
    const GenerationConfig& cfg, const CandidateNaming& naming);

/// Greedy decoding from the seed's first cfg.prefix_len tokens; ties break to
/// the lexicographically smallest token. Pure in (backend, seed, cfg).
/// Throws Error(kSeedTooShort).
corpus::TestProgram generate_greedy(const GeneratorBackend& backend,
                                    const corpus::TestProgram& seed,
                                    const GenerationConfig& cfg,
                                    const CandidateNaming& naming);

inline constexpr std::size_t kGreedyPrefixLen = 10;

}  // namespace adaptfuzz::generator
