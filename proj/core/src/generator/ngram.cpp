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

#include "adaptfuzz/generator/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "adaptfuzz/error.hpp"
#include "adaptfuzz/rng.hpp"

namespace adaptfuzz::generator {

using nlohmann::json;

namespace {

constexpr int kSnapshotVersion = 1;

template <typename It>
std::string context_key(It first, It last) {
  std::string key;
  key.reserve(static_cast<std::size_t>(last - first) * 4);
  for (; first != last; ++first) {
    const std::uint32_t v = *first;
    key.push_back(static_cast<char>(v & 0xff));
    key.push_back(static_cast<char>((v >> 8) & 0xff));
    key.push_back(static_cast<char>((v >> 16) & 0xff));
    key.push_back(static_cast<char>((v >> 24) & 0xff));
  }
  return key;
}

std::vector<std::uint32_t> decode_key(const std::string& key) {
  std::vector<std::uint32_t> ids(key.size() / 4);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = static_cast<std::uint32_t>(static_cast<unsigned char>(key[4 * i])) |
             static_cast<std::uint32_t>(static_cast<unsigned char>(key[4 * i + 1])) << 8 |
             static_cast<std::uint32_t>(static_cast<unsigned char>(key[4 * i + 2])) << 16 |
             static_cast<std::uint32_t>(static_cast<unsigned char>(key[4 * i + 3])) << 24;
  }
  return ids;
}

}  // namespace

// Friend of NGramModel; owns the count and EM machinery used by fit().
struct NGramBuilder {
  using TokenId = NGramModel::TokenId;
  using Table = NGramModel::Table;
  using Level = NGramModel::Level;

  static std::vector<Level> count(const std::vector<std::vector<TokenId>>& seqs,
                                  const std::vector<std::size_t>& which,
                                  std::size_t order) {
    std::vector<std::unordered_map<std::string, std::map<TokenId, std::uint32_t>>>
        raw(order);
    for (std::size_t s : which) {
      const auto& seq = seqs[s];
      for (std::size_t p = order - 1; p < seq.size(); ++p) {
        for (std::size_t k = 0; k < order; ++k) {
          auto key = context_key(seq.begin() + static_cast<std::ptrdiff_t>(p - k),
                                 seq.begin() + static_cast<std::ptrdiff_t>(p));
          ++raw[k][key][seq[p]];
        }
      }
    }
    std::vector<Level> levels(order);
    for (std::size_t k = 0; k < order; ++k) {
      for (auto& [key, counts] : raw[k]) {
        Table t;
        t.next.assign(counts.begin(), counts.end());
        for (const auto& [id, c] : t.next) t.total += c;
        levels[k].emplace(key, std::move(t));
      }
    }
    return levels;
  }

  static double ml(const Table& t, TokenId next) {
    auto it = std::lower_bound(
        t.next.begin(), t.next.end(), next,
        [](const auto& entry, TokenId id) { return entry.first < id; });
    if (it == t.next.end() || it->first != next) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(t.total);
  }

  // q_k(next | ctx) for k = 0..order-1 with back-off to the deepest observed
  // context. `ctx` holds exactly order-1 ids.
  static void component_probs(const std::vector<Level>& levels,
                              const std::vector<TokenId>& ctx, TokenId next,
                              std::vector<double>& q) {
    const std::size_t order = levels.size();
    q.assign(order, 0.0);
    double last = 0.0;
    bool seen = true;
    for (std::size_t k = 0; k < order; ++k) {
      if (seen) {
        auto it = levels[k].find(context_key(
            ctx.end() - static_cast<std::ptrdiff_t>(k), ctx.end()));
        if (it == levels[k].end()) {
          seen = false;
        } else {
          last = ml(it->second, next);
        }
      }
      q[k] = last;
    }
  }
};

NGramModel::NGramModel(NGramOptions options)
    : options_(options),
      vocab_(std::make_shared<const std::vector<Token>>()),
      levels_(options.order),
      weights_(options.order, options.order ? 1.0 / static_cast<double>(options.order) : 0.0) {
  if (options_.order < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram order must be >= 1");
  }
}

NGramModel::TokenId NGramModel::bos_id() const {
  return static_cast<TokenId>(vocab_->size());
}

NGramModel::TokenId NGramModel::unk_id() const {
  return static_cast<TokenId>(vocab_->size() + 1);
}

NGramModel::TokenId NGramModel::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? unk_id() : it->second;
}

std::vector<NGramModel::TokenId> NGramModel::context_ids(
    std::span<const Token> prefix) const {
  const std::size_t width = options_.order - 1;
  std::vector<TokenId> ctx(width, bos_id());
  const std::size_t take = std::min(width, prefix.size());
  for (std::size_t i = 0; i < take; ++i) {
    ctx[width - take + i] = id_of(prefix[prefix.size() - take + i]);
  }
  return ctx;
}

std::size_t NGramModel::deepest_level(const std::vector<TokenId>& ctx,
                                      std::vector<const Table*>& tables) const {
  tables.assign(options_.order, nullptr);
  std::size_t deepest = 0;
  for (std::size_t k = 0; k < options_.order; ++k) {
    auto it = levels_[k].find(
        context_key(ctx.end() - static_cast<std::ptrdiff_t>(k), ctx.end()));
    if (it == levels_[k].end()) break;
    tables[k] = &it->second;
    deepest = k;
  }
  return deepest;
}

void NGramModel::fill_distribution(const std::vector<TokenId>& ctx,
                                   std::vector<double>& probs) const {
  const double v = static_cast<double>(vocab_->size());
  const double scale = 1.0 - v * kFloor;
  probs.assign(vocab_->size(), kFloor);
  std::vector<const Table*> tables;
  const std::size_t d = deepest_level(ctx, tables);
  auto add = [&](const Table& t, double weight) {
    if (weight == 0.0) return;
    const double total = static_cast<double>(t.total);
    for (const auto& [id, c] : t.next) {
      probs[id] += weight * static_cast<double>(c) / total;
    }
  };
  for (std::size_t k = 0; k < d; ++k) add(*tables[k], scale * weights_[k]);
  double tail = 0.0;
  for (std::size_t k = d; k < options_.order; ++k) tail += weights_[k];
  add(*tables[d], scale * tail);
}

double NGramModel::probability(const std::vector<TokenId>& ctx,
                               TokenId next) const {
  if (next >= vocab_->size()) return kFloor;
  std::vector<double> q;
  NGramBuilder::component_probs(levels_, ctx, next, q);
  const double scale = 1.0 - static_cast<double>(vocab_->size()) * kFloor;
  double p = kFloor;
  for (std::size_t k = 0; k < q.size(); ++k) p += scale * weights_[k] * q[k];
  return p;
}

NGramModel NGramModel::fit(std::span<const corpus::ProgramPtr> programs,
                           int epochs, NGramOptions options,
                           NGramTrainingReport* report) {
  if (programs.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "training set is empty");
  }
  if (epochs < 1) {
    throw Error(ErrorCode::kInvalidArgument, "epochs must be >= 1");
  }
  NGramModel model(options);
  const std::size_t order = options.order;

  std::set<Token> vocab_set{Token(kEosToken)};
  for (const auto& p : programs) {
    vocab_set.insert(p->tokens().begin(), p->tokens().end());
  }
  auto vocab = std::make_shared<std::vector<Token>>(vocab_set.begin(),
                                                    vocab_set.end());
  for (std::size_t i = 0; i < vocab->size(); ++i) {
    model.ids_.emplace((*vocab)[i], static_cast<TokenId>(i));
  }
  model.vocab_ = vocab;
  if (static_cast<double>(vocab->size()) * kFloor >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary too large for floor");
  }

  const TokenId bos = model.bos_id();
  const TokenId eos = model.ids_.at(Token(kEosToken));
  std::vector<std::vector<TokenId>> seqs;
  seqs.reserve(programs.size());
  for (const auto& p : programs) {
    std::vector<TokenId> seq(order - 1, bos);
    for (const auto& t : p->tokens()) seq.push_back(model.ids_.at(t));
    seq.push_back(eos);
    seqs.push_back(std::move(seq));
  }

  // Held-out split for weight tuning.
  std::vector<std::size_t> idx(seqs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(options.rng_seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.below(i)]);
  }
  std::size_t n_held = 0;
  if (seqs.size() >= 2) {
    n_held = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(
               options.heldout_fraction * static_cast<double>(seqs.size()))));
    n_held = std::min(n_held, seqs.size() - 1);
  }
  std::vector<std::size_t> held(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_held));
  std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_held), idx.end());
  std::sort(held.begin(), held.end());
  std::sort(train.begin(), train.end());
  if (held.empty()) held = train;  // single program: tune on itself

  const auto tuning = NGramBuilder::count(seqs, train, order);

  // Component probabilities for every held-out position, computed once.
  std::vector<double> comp;
  std::vector<double> q;
  std::vector<TokenId> ctx(order - 1);
  for (std::size_t s : held) {
    const auto& seq = seqs[s];
    for (std::size_t p = order - 1; p < seq.size(); ++p) {
      std::copy(seq.begin() + static_cast<std::ptrdiff_t>(p - (order - 1)),
                seq.begin() + static_cast<std::ptrdiff_t>(p), ctx.begin());
      NGramBuilder::component_probs(tuning, ctx, seq[p], q);
      comp.insert(comp.end(), q.begin(), q.end());
    }
  }
  const std::size_t positions = comp.size() / order;
  const double scale = 1.0 - static_cast<double>(vocab->size()) * kFloor;

  auto heldout_nll = [&](const std::vector<double>& w) {
    double nll = 0.0;
    for (std::size_t i = 0; i < positions; ++i) {
      double p = kFloor;
      for (std::size_t k = 0; k < order; ++k) p += scale * w[k] * comp[i * order + k];
      nll -= std::log(p);
    }
    return positions ? nll / static_cast<double>(positions) : 0.0;
  };

  NGramTrainingReport local;
  local.heldout_programs = n_held;
  local.initial_heldout_nll = heldout_nll(model.weights_);
  for (int e = 0; e < epochs; ++e) {
    // One EM round. The floor is a component with fixed weight, so the
    // free weights are renormalized among themselves.
    std::vector<double> resp(order, 0.0);
    for (std::size_t i = 0; i < positions; ++i) {
      double p = kFloor;
      for (std::size_t k = 0; k < order; ++k) {
        p += scale * model.weights_[k] * comp[i * order + k];
      }
      for (std::size_t k = 0; k < order; ++k) {
        resp[k] += scale * model.weights_[k] * comp[i * order + k] / p;
      }
    }
    double total = 0.0;
    for (double r : resp) total += r;
    if (total > 0.0) {
      for (std::size_t k = 0; k < order; ++k) model.weights_[k] = resp[k] / total;
    }
    local.heldout_nll_by_epoch.push_back(heldout_nll(model.weights_));
  }

  std::vector<std::size_t> all(seqs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  model.levels_ = NGramBuilder::count(seqs, all, order);
  if (report) *report = std::move(local);
  return model;
}

BackendCapabilities NGramModel::capabilities() const {
  return {true, options_.order - 1};
}

TrainOutcome NGramModel::train(std::span<const corpus::ProgramPtr> programs,
                               int epochs) const {
  NGramTrainingReport report;
  auto model = std::make_shared<const NGramModel>(
      fit(programs, epochs, options_, &report));
  return {model, report.heldout_nll_by_epoch.back()};
}

TokenDistribution NGramModel::next_token_distribution(
    std::span<const Token> prefix) const {
  if (!trained()) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram model is not trained");
  }
  TokenDistribution dist{vocab_, {}};
  fill_distribution(context_ids(prefix), dist.probs);
  return dist;
}

double NGramModel::raw_probability(std::span<const Token> context,
                                   std::string_view next) const {
  if (context.size() >= options_.order) {
    throw Error(ErrorCode::kInvalidArgument, "context longer than order-1");
  }
  std::vector<TokenId> ids;
  for (const auto& t : context) ids.push_back(id_of(t));
  auto it = levels_[context.size()].find(context_key(ids.begin(), ids.end()));
  if (it == levels_[context.size()].end()) return 0.0;
  const TokenId target = id_of(next);
  return NGramBuilder::ml(it->second, target);
}

double NGramModel::average_nll(
    std::span<const corpus::ProgramPtr> programs) const {
  if (!trained()) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram model is not trained");
  }
  const std::size_t order = options_.order;
  double nll = 0.0;
  std::size_t n = 0;
  for (const auto& p : programs) {
    std::vector<TokenId> seq(order - 1, bos_id());
    for (const auto& t : p->tokens()) seq.push_back(id_of(t));
    seq.push_back(id_of(kEosToken));
    std::vector<TokenId> ctx(order - 1);
    for (std::size_t i = order - 1; i < seq.size(); ++i) {
      std::copy(seq.begin() + static_cast<std::ptrdiff_t>(i - (order - 1)),
                seq.begin() + static_cast<std::ptrdiff_t>(i), ctx.begin());
      nll -= std::log(probability(ctx, seq[i]));
      ++n;
    }
  }
  return n ? nll / static_cast<double>(n) : 0.0;
}

std::vector<Token> NGramModel::continue_program(
    std::span<const Token> prefix, const SamplingRequest& request) const {
  if (!trained()) {
    throw Error(ErrorCode::kInvalidArgument, "n-gram model is not trained");
  }
  const bool greedy = request.temperature < kGreedyTemperature;
  if (!greedy && !(request.temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  }
  EndOfProgram eop;
  eop.feed(prefix);
  auto ctx = context_ids(prefix);
  Rng rng(request.rng_seed);
  std::vector<double> probs;
  std::vector<Token> out;
  const auto& vocab = *vocab_;
  while (out.size() < request.max_new_tokens) {
    fill_distribution(ctx, probs);
    const std::size_t i = greedy ? argmax_index(probs, vocab)
                                 : sample_index(probs, vocab,
                                                request.temperature, rng);
    const Token& tok = vocab[i];
    if (eop.terminates(tok)) break;
    out.push_back(tok);
    eop.feed(tok);
    if (!ctx.empty()) {
      std::rotate(ctx.begin(), ctx.begin() + 1, ctx.end());
      ctx.back() = static_cast<TokenId>(i);
    }
  }
  return out;
}

std::string NGramModel::to_snapshot() const {
  json j;
  j["format"] = "adaptfuzz-ngram";
  j["version"] = kSnapshotVersion;
  j["order"] = options_.order;
  j["rng_seed"] = options_.rng_seed;
  j["heldout_fraction"] = options_.heldout_fraction;
  j["vocab"] = *vocab_;
  j["weights"] = weights_;
  json levels = json::array();
  for (const auto& level : levels_) {
    std::vector<const std::string*> keys;
    keys.reserve(level.size());
    for (const auto& [key, t] : level) keys.push_back(&key);
    std::sort(keys.begin(), keys.end(),
              [](const std::string* a, const std::string* b) {
                return decode_key(*a) < decode_key(*b);
              });
    json entries = json::array();
    for (const auto* key : keys) {
      json next = json::array();
      for (const auto& [id, c] : level.at(*key).next) next.push_back({id, c});
      entries.push_back({{"context", decode_key(*key)}, {"next", next}});
    }
    levels.push_back(std::move(entries));
  }
  j["levels"] = std::move(levels);
  return j.dump();
}

NGramModel NGramModel::from_snapshot(const std::string& snapshot) {
  try {
    const auto j = json::parse(snapshot);
    if (j.at("format") != "adaptfuzz-ngram" ||
        j.at("version").get<int>() != kSnapshotVersion) {
      throw Error(ErrorCode::kMalformedInput, "not an n-gram snapshot v1");
    }
    NGramOptions opts;
    opts.order = j.at("order").get<std::size_t>();
    opts.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    opts.heldout_fraction = j.at("heldout_fraction").get<double>();
    NGramModel model(opts);
    auto vocab = std::make_shared<std::vector<Token>>(
        j.at("vocab").get<std::vector<Token>>());
    for (std::size_t i = 0; i < vocab->size(); ++i) {
      model.ids_.emplace((*vocab)[i], static_cast<TokenId>(i));
    }
    model.vocab_ = vocab;
    model.weights_ = j.at("weights").get<std::vector<double>>();
    const auto& levels = j.at("levels");
    if (model.weights_.size() != opts.order || levels.size() != opts.order) {
      throw Error(ErrorCode::kMalformedInput, "snapshot order mismatch");
    }
    for (std::size_t k = 0; k < opts.order; ++k) {
      for (const auto& e : levels[k]) {
        const auto ctx = e.at("context").get<std::vector<TokenId>>();
        Table t;
        for (const auto& n : e.at("next")) {
          const auto id = n.at(0).get<TokenId>();
          if (id >= vocab->size()) {
            throw Error(ErrorCode::kMalformedInput, "token id out of range");
          }
          t.next.emplace_back(id, n.at(1).get<std::uint32_t>());
          t.total += t.next.back().second;
        }
        if (ctx.size() != k || t.total == 0) {
          throw Error(ErrorCode::kMalformedInput, "bad snapshot table");
        }
        std::sort(t.next.begin(), t.next.end());
        model.levels_[k].emplace(context_key(ctx.begin(), ctx.end()),
                                 std::move(t));
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput,
                std::string("n-gram snapshot: ") + e.what());
  }
}

}  // namespace adaptfuzz::generator
