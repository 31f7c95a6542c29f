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
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptfuzz/generator/generate.hpp"

namespace adaptfuzz::campaign {

enum class Mode { kPerturbed, kGreedyAblation, kNoAugmentationAblation };

std::string_view to_string(Mode mode);
/// Throws Error(kConfigInvalid).
Mode mode_from_string(std::string_view name);

/// kWall measures real time. kLogical charges 1 ms per compiler run (a
/// timed-out run is charged its timeout) and stamps events relative to the
/// Unix epoch, which makes every exported time deterministic.
enum class ClockKind { kWall, kLogical };

struct CampaignConfig {
  int max_iterations = 1;
  int epochs = 5;
  std::size_t max_seed_samples = 35'000;
  std::size_t token_limit = 600;
  double temperature = 1.0;
  std::size_t prefix_len = 3;
  std::size_t candidates_per_seed = 4;
  std::optional<std::chrono::milliseconds> wall_clock_budget;
  std::size_t worker_pool_width = 1;
  std::uint64_t rng_seed = 0;
  Mode mode = Mode::kPerturbed;

  std::chrono::milliseconds timeout{10'000};
  ClockKind clock = ClockKind::kWall;
  std::size_t sweep_batch = 32;  // programs between budget checks
  std::size_t ngram_order = 4;
  std::vector<std::string> frame_prefixes{"mlir::"};

  /// Throws Error(kConfigInvalid) naming the first offending field.
  void validate() const;

  /// The configuration actually run: greedy mode pins prefix_len to 10 and
  /// candidates_per_seed to 1.
  CampaignConfig effective() const;

  generator::GenerationConfig generation(std::uint64_t rng_seed) const;

  /// JSON object whose keys are the field names above. Durations are in
  /// seconds (`wall_clock_budget` may be null); `clock` is "wall" or
  /// "logical"; `mode` is "Perturbed", "GreedyAblation" or
  /// "NoAugmentationAblation".
  std::string to_json() const;
  /// Unknown keys and wrongly typed values are Error(kConfigInvalid).
  /// Missing keys keep their defaults. Validates the result.
  static CampaignConfig from_json(std::string_view text);

  /// Applies `--key value` style overrides; keys as in to_json(). Values are
  /// read as JSON when they parse, as plain strings otherwise.
  void apply_overrides(const std::map<std::string, std::string>& overrides);
};

}  // namespace adaptfuzz::campaign
