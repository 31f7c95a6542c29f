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
#include <memory>
#include <span>
#include <vector>

#include "adaptfuzz/corpus/program.hpp"
#include "adaptfuzz/generator/sampling.hpp"

namespace adaptfuzz::generator {

struct BackendCapabilities {
  bool supports_training = false;
  std::size_t max_context = 0;
};

struct SamplingRequest {
  std::size_t max_new_tokens = 0;
  double temperature = 1.0;  // below kGreedyTemperature means argmax
  std::uint64_t rng_seed = 0;
};

class GeneratorBackend;

struct TrainOutcome {
  std::shared_ptr<const GeneratorBackend> backend;
  double heldout_nll = 0.0;
};

/// The generator model contract. A backend value is immutable: training
/// yields a new backend, so one instance can serve concurrent generation
/// streams.
class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;

  virtual BackendCapabilities capabilities() const = 0;

  /// Throws Error(kEmptyTrainingSet) for an empty set and
  /// Error(kBackendUnavailable) when a remote backend cannot be reached.
  virtual TrainOutcome train(std::span<const corpus::ProgramPtr> programs,
                             int epochs) const = 0;

  /// Tokens continuing `prefix` (prefix excluded), stopping at end of
  /// program or after max_new_tokens. Deterministic in request.rng_seed.
  virtual std::vector<Token> continue_program(
      std::span<const Token> prefix, const SamplingRequest& request) const = 0;
};

using BackendPtr = std::shared_ptr<const GeneratorBackend>;

}  // namespace adaptfuzz::generator
