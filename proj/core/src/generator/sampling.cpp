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

#include "adaptfuzz/generator/sampling.hpp"

#include <cmath>
#include <limits>

#include "adaptfuzz/error.hpp"

namespace adaptfuzz::generator {

std::size_t argmax_index(std::span<const double> probs,
                         std::span<const Token> vocab) {
  std::size_t best = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (best == probs.size() || probs[i] > probs[best] ||
        (probs[i] == probs[best] && vocab[i] < vocab[best])) {
      best = i;
    }
  }
  if (best == probs.size() || !(probs[best] > 0.0)) {
    throw Error(ErrorCode::kDegenerateDistribution, "all probabilities are 0");
  }
  return best;
}

std::size_t sample_index(std::span<const double> probs,
                         std::span<const Token> vocab, double temperature,
                         Rng& rng) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  }
  if (temperature < kGreedyTemperature) return argmax_index(probs, vocab);

  std::vector<double> weights;
  std::span<const double> w = probs;
  if (temperature != 1.0) {
    // p^(1/T) in log space, shifted by the max so nothing underflows to 0.
    double max_log = -std::numeric_limits<double>::infinity();
    for (double p : probs) {
      if (p > 0.0) max_log = std::max(max_log, std::log(p) / temperature);
    }
    weights.resize(probs.size(), 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) {
        weights[i] = std::exp(std::log(probs[i]) / temperature - max_log);
      }
    }
    w = weights;
  }

  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kDegenerateDistribution, "all probabilities are 0");
  }
  const double target = rng.unit() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    acc += w[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;  // rounding left target == total
}

void EndOfProgram::feed(std::span<const Token> tokens) {
  for (const auto& t : tokens) feed(t);
}

void EndOfProgram::feed(std::string_view token) {
  if (token == "{") {
    ++braces_;
    opened_ = true;
  } else if (token == "}") {
    --braces_;
  } else if (token == "(") {
    ++parens_;
  } else if (token == ")") {
    --parens_;
  }
}

bool EndOfProgram::terminates(std::string_view next) const {
  if (next == kEosToken) return true;
  return corpus::is_newline(next) && opened_ && braces_ <= 0 && parens_ <= 0;
}

}  // namespace adaptfuzz::generator
