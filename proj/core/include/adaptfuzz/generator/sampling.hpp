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
#include <memory>
#include <span>
#include <vector>

#include "adaptfuzz/corpus/tokenizer.hpp"
#include "adaptfuzz/rng.hpp"

namespace adaptfuzz::generator {

using corpus::Token;

/// Temperatures below this switch sampling to argmax.
inline constexpr double kGreedyTemperature = 1e-6;

/// Reserved end-of-program marker. The lexer can never produce it because
/// `<` is always a token of its own.
inline constexpr std::string_view kEosToken = "<eos>";

struct TokenDistribution {
  std::shared_ptr<const std::vector<Token>> vocab;
  std::vector<double> probs;  // parallel to *vocab

  const Token& token(std::size_t i) const { return (*vocab)[i]; }
  std::size_t size() const { return probs.size(); }
};

/// Index of the most probable entry; ties go to the lexicographically
/// smallest token text.
std::size_t argmax_index(std::span<const double> probs,
                         std::span<const Token> vocab);

inline std::size_t argmax_index(const TokenDistribution& dist) {
  return argmax_index(dist.probs, *dist.vocab);
}

/// Draws an index from dist^(1/temperature), renormalized. Temperatures below
/// kGreedyTemperature return argmax_index. Throws
/// Error(kDegenerateDistribution) when every entry is zero, and
/// Error(kInvalidArgument) for a non-positive temperature.
std::size_t sample_index(std::span<const double> probs,
                         std::span<const Token> vocab, double temperature,
                         Rng& rng);

inline std::size_t sample_index(const TokenDistribution& dist,
                                double temperature, Rng& rng) {
  return sample_index(dist.probs, *dist.vocab, temperature, rng);
}

inline const Token& sample_token(const TokenDistribution& dist,
                                 double temperature, Rng& rng) {
  return dist.token(sample_index(dist, temperature, rng));
}

/// Tracks brace depth over a growing token sequence and decides when a
/// program is complete: an explicit EOS, or a line break once every opened
/// brace and paren is closed again.
class EndOfProgram {
 public:
  void feed(std::span<const Token> tokens);
  void feed(std::string_view token);

  /// True if `next` would end the program. The terminating token itself is
  /// not part of the program.
  bool terminates(std::string_view next) const;

  int brace_depth() const { return braces_; }

 private:
  int braces_ = 0;
  int parens_ = 0;
  bool opened_ = false;
};

}  // namespace adaptfuzz::generator
