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

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "adaptfuzz/generator/backend.hpp"

namespace adaptfuzz::generator {

struct NGramOptions {
  std::size_t order = 4;
  std::uint64_t rng_seed = 0;  // drives the held-out split
  double heldout_fraction = 0.1;
};

/// Per-epoch record of interpolation-weight tuning.
struct NGramTrainingReport {
  double initial_heldout_nll = 0.0;          // uniform weights
  std::vector<double> heldout_nll_by_epoch;  // after each EM round
  std::size_t heldout_programs = 0;
};

/// Count-based n-gram model with Jelinek-Mercer interpolation.
///
/// P(w | h) = (1 - V*floor) * sum_k lambda_k * q_k(w | h) + floor
///
/// where q_k is the maximum-likelihood estimate with a length-k context when
/// that context was observed, and otherwise the deepest observed shorter
/// context. k runs over 0..order-1, V counts every predictable token (EOS
/// included, BOS excluded), and floor is kFloor. Training counts every
/// program in full; each epoch is one EM round re-tuning lambda on a held-out
/// split.
class NGramModel final : public GeneratorBackend {
 public:
  static constexpr double kFloor = 1e-6;

  explicit NGramModel(NGramOptions options = {});

  /// Throws Error(kEmptyTrainingSet) or Error(kInvalidArgument) for
  /// epochs < 1.
  static NGramModel fit(std::span<const corpus::ProgramPtr> programs,
                        int epochs, NGramOptions options,
                        NGramTrainingReport* report = nullptr);

  BackendCapabilities capabilities() const override;
  TrainOutcome train(std::span<const corpus::ProgramPtr> programs,
                     int epochs) const override;
  std::vector<Token> continue_program(
      std::span<const Token> prefix,
      const SamplingRequest& request) const override;

  bool trained() const { return !vocab_->empty(); }

  /// Conditions on at most order-1 trailing tokens; unknown tokens back off.
  /// Throws Error(kInvalidArgument) on an untrained model.
  TokenDistribution next_token_distribution(std::span<const Token> prefix) const;

  /// Unsmoothed count ratio c(context, next) / c(context) for a context of
  /// exactly context.size() tokens. Returns 0 for unseen contexts.
  double raw_probability(std::span<const Token> context,
                         std::string_view next) const;

  /// Mean per-token negative log-likelihood (nats) of the programs,
  /// EOS included.
  double average_nll(std::span<const corpus::ProgramPtr> programs) const;

  const std::vector<Token>& vocab() const { return *vocab_; }
  const std::vector<double>& weights() const { return weights_; }
  const NGramOptions& options() const { return options_; }

  /// Versioned JSON snapshot; loading it reproduces every distribution
  /// bit for bit.
  std::string to_snapshot() const;
  static NGramModel from_snapshot(const std::string& snapshot);

 private:
  using TokenId = std::uint32_t;
  struct Table {
    std::vector<std::pair<TokenId, std::uint32_t>> next;  // sorted by id
    std::uint64_t total = 0;
  };
  using Level = std::unordered_map<std::string, Table>;

  TokenId bos_id() const;
  TokenId unk_id() const;
  TokenId id_of(std::string_view token) const;
  std::vector<TokenId> context_ids(std::span<const Token> prefix) const;
  /// Deepest observed context length for the trailing ids, and the tables.
  std::size_t deepest_level(const std::vector<TokenId>& ctx,
                            std::vector<const Table*>& tables) const;
  void fill_distribution(const std::vector<TokenId>& ctx,
                         std::vector<double>& probs) const;
  double probability(const std::vector<TokenId>& ctx, TokenId next) const;

  NGramOptions options_;
  std::shared_ptr<const std::vector<Token>> vocab_;
  std::unordered_map<std::string, TokenId> ids_;
  std::vector<Level> levels_;
  std::vector<double> weights_;

  friend struct NGramBuilder;
};

}  // namespace adaptfuzz::generator
