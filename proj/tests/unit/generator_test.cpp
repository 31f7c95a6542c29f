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

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "adaptfuzz/corpus/program.hpp"
#include "adaptfuzz/corpus/tokenizer.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/generator/generate.hpp"
#include "adaptfuzz/generator/ngram.hpp"
#include "adaptfuzz/generator/sampling.hpp"
#include "adaptfuzz/rng.hpp"
#include "chi_square.hpp"
#include "test_support.hpp"

namespace adaptfuzz::generator {
namespace {

using corpus::ProgramPtr;
using corpus::Provenance;
using corpus::TestProgram;
using Tokens = std::vector<Token>;

ProgramPtr prog(const std::string& id, std::string_view text) {
  return std::make_shared<const TestProgram>(
      TestProgram::from_text(id, text, Provenance::kSeed, 0, std::nullopt));
}

std::vector<ProgramPtr> progs(std::initializer_list<std::string_view> texts) {
  std::vector<ProgramPtr> out;
  for (auto t : texts) out.push_back(prog("p" + std::to_string(out.size()), t));
  return out;
}

std::vector<ProgramPtr> fixture_programs() { return testing::fixture_corpus().entries(); }

NGramModel fit(const std::vector<ProgramPtr>& ps, std::size_t order = 4, int epochs = 5) {
  NGramOptions opts;
  opts.order = order;
  return NGramModel::fit(ps, epochs, opts);
}

// --- n-gram model ----------------------------------------------------------

TEST(NGramModel, BigramCountsByHand) {
  const auto m = fit(progs({"a b a b"}), 2);
  EXPECT_DOUBLE_EQ(m.raw_probability(Tokens{"a"}, "b"), 1.0);
  EXPECT_DOUBLE_EQ(m.raw_probability(Tokens{"b"}, "a"), 0.5);
  EXPECT_DOUBLE_EQ(m.raw_probability(Tokens{"z"}, "a"), 0.0);
}

TEST(NGramModel, SymmetricContinuations) {
  const auto m = fit(progs({"a b", "a c"}), 2);
  EXPECT_DOUBLE_EQ(m.raw_probability(Tokens{"a"}, "b"), 0.5);
  EXPECT_DOUBLE_EQ(m.raw_probability(Tokens{"a"}, "c"), 0.5);
  const auto d = m.next_token_distribution(Tokens{"a"});
  double pb = 0, pc = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.token(i) == "b") pb = d.probs[i];
    if (d.token(i) == "c") pc = d.probs[i];
  }
  EXPECT_NEAR(pb, pc, 1e-12);
  EXPECT_GT(pb, 0.3);
}

TEST(NGramModel, DistributionsAreNormalizedAndPositive) {
  const auto ps = fixture_programs();
  const auto m = fit(ps);
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& toks = ps[rng.below(ps.size())]->tokens();
    const auto cut = rng.below(toks.size() + 1);
    const auto d = m.next_token_distribution(std::span(toks).first(cut));
    ASSERT_EQ(d.size(), m.vocab().size());
    const double sum = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-9);
    for (double p : d.probs) EXPECT_GT(p, 0.0);
  }
}

TEST(NGramModel, UnseenPrefixBacksOffToUnigramMix) {
  const auto m = fit(progs({"x y z", "x y"}), 3);
  const auto a = m.next_token_distribution(Tokens{"never", "seen"});
  const auto b = m.next_token_distribution(Tokens{});
  ASSERT_EQ(a.size(), b.size());
  const double sum = std::accumulate(a.probs.begin(), a.probs.end(), 0.0);
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(NGramModel, UntrainedDistributionIsAnError) {
  EXPECT_THROW(NGramModel().next_token_distribution(Tokens{}), Error);
}

TEST(NGramModel, TrainingErrors) {
  EXPECT_THROW(fit({}), Error);
  try {
    NGramModel().train(std::vector<ProgramPtr>{}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTrainingSet);
  }
  EXPECT_THROW(fit(progs({"a"}), 2, 0), Error);
}

TEST(NGramModel, HeldoutNllNeverRisesAcrossEpochs) {
  const auto ps = fixture_programs();
  NGramTrainingReport rep;
  NGramOptions opts;
  opts.rng_seed = 17;
  const auto m = NGramModel::fit(ps, 5, opts, &rep);
  ASSERT_EQ(rep.heldout_nll_by_epoch.size(), 5u);
  double prev = rep.initial_heldout_nll;
  for (double nll : rep.heldout_nll_by_epoch) {
    EXPECT_LE(nll, prev + 1e-12);
    prev = nll;
  }
  // Uniform over the vocabulary is the untrained baseline.
  EXPECT_LT(rep.heldout_nll_by_epoch.back(), std::log(static_cast<double>(m.vocab().size())));
}

TEST(NGramModel, MoreEpochsNeverWorsenHeldout) {
  const auto ps = fixture_programs();
  for (int e = 1; e < 6; ++e) {
    NGramTrainingReport a, b;
    NGramModel::fit(ps, e, {}, &a);
    NGramModel::fit(ps, e + 1, {}, &b);
    EXPECT_LE(b.heldout_nll_by_epoch.back(), a.heldout_nll_by_epoch.back() + 1e-12);
  }
}

TEST(NGramModel, TrainingIsDeterministic) {
  const auto ps = fixture_programs();
  EXPECT_EQ(fit(ps).to_snapshot(), fit(ps).to_snapshot());
}

TEST(NGramModel, SnapshotReproducesDistributionsExactly) {
  const auto ps = fixture_programs();
  const auto m = fit(ps);
  const auto r = NGramModel::from_snapshot(m.to_snapshot());
  EXPECT_EQ(r.to_snapshot(), m.to_snapshot());
  for (std::size_t i = 0; i < ps.size(); i += 5) {
    const auto& t = ps[i]->tokens();
    for (std::size_t cut : {std::size_t{0}, std::size_t{2}, t.size() / 2}) {
      EXPECT_EQ(m.next_token_distribution(std::span(t).first(cut)).probs,
                r.next_token_distribution(std::span(t).first(cut)).probs);
    }
  }
  EXPECT_THROW(NGramModel::from_snapshot("{\"format\":\"nope\"}"), Error);
}

// --- sampling --------------------------------------------------------------

TEST(SampleToken, FairCoin) {
  const auto vocab = std::make_shared<const Tokens>(Tokens{"a", "b"});
  TokenDistribution d{vocab, {0.5, 0.5}};
  Rng rng(1);
  int a = 0;
  for (int i = 0; i < 10'000; ++i) a += sample_token(d, 1.0, rng) == "a";
  EXPECT_NEAR(a / 10'000.0, 0.5, 0.03);
}

TEST(SampleToken, BiasedCoinWithinBinomialBounds) {
  const auto vocab = std::make_shared<const Tokens>(Tokens{"a", "b"});
  TokenDistribution d{vocab, {0.9, 0.1}};
  Rng rng(2);
  int a = 0;
  for (int i = 0; i < 10'000; ++i) a += sample_token(d, 1.0, rng) == "a";
  // sd = sqrt(0.09 / 10000) = 0.003; the band is +-10 sd.
  EXPECT_GE(a / 10'000.0, 0.87);
  EXPECT_LE(a / 10'000.0, 0.93);
}

TEST(SampleToken, ColdTemperatureIsArgmax) {
  const auto vocab = std::make_shared<const Tokens>(Tokens{"a", "b", "c"});
  TokenDistribution d{vocab, {0.2, 0.5, 0.3}};
  Rng rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_token(d, 1e-7, rng), "b");
}

TEST(SampleToken, DegenerateDistribution) {
  const auto vocab = std::make_shared<const Tokens>(Tokens{"a", "b"});
  TokenDistribution d{vocab, {0.0, 0.0}};
  Rng rng(4);
  try {
    sample_token(d, 1.0, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateDistribution);
  }
}

TEST(SampleToken, ArgmaxTieBreaksLexicographically) {
  const Tokens vocab{"b", "a"};
  const std::vector<double> probs{0.5, 0.5};
  EXPECT_EQ(argmax_index(probs, vocab), 1u);
}

TEST(SampleToken, DeterministicInRngState) {
  const auto vocab = std::make_shared<const Tokens>(Tokens{"a", "b", "c", "d"});
  TokenDistribution d{vocab, {0.1, 0.2, 0.3, 0.4}};
  Rng r1(9), r2(9);
  for (int i = 0; i < 500; ++i) EXPECT_EQ(sample_token(d, 1.0, r1), sample_token(d, 1.0, r2));
}

// Tempered sampling follows p^(1/T) normalized.
TEST(SampleToken, TemperatureReshapesDistribution) {
  const auto vocab = std::make_shared<const Tokens>(Tokens{"a", "b", "c", "d", "e"});
  const std::vector<double> base{0.05, 0.1, 0.15, 0.3, 0.4};
  TokenDistribution d{vocab, base};
  for (double temp : {0.5, 1.0, 2.0}) {
    std::vector<double> expect(base.size());
    double z = 0;
    for (std::size_t i = 0; i < base.size(); ++i) z += expect[i] = std::pow(base[i], 1.0 / temp);
    for (auto& e : expect) e /= z;
    std::vector<int> counts(base.size());
    Rng rng(static_cast<std::uint64_t>(temp * 100));
    for (int i = 0; i < 10'000; ++i) ++counts[sample_index(d, temp, rng)];
    EXPECT_GT(testing::chi_square_p(expect, counts, 10'000), 0.01) << "temperature " << temp;
  }
}

// Five-token model: the empirical next-token frequencies of the full
// generation path match next_token_distribution.
TEST(Generation, ChiSquareAgainstModelDistribution) {
  std::vector<ProgramPtr> ps;
  const char* lines[] = {"a b c", "a b d", "a b b", "a b e", "a b c", "a b c", "a b d", "e a b"};
  for (auto l : lines) ps.push_back(prog("c" + std::to_string(ps.size()), l));
  const auto m = fit(ps, 3);
  const Tokens prefix{"a", "b"};
  const auto d = m.next_token_distribution(prefix);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < d.size(); ++i) index[d.token(i)] = i;
  std::vector<int> counts(d.size());
  constexpr int kN = 10'000;
  for (int i = 0; i < kN; ++i) {
    SamplingRequest req{1, 1.0, derive_seed({42, static_cast<std::uint64_t>(i)})};
    const auto out = m.continue_program(prefix, req);
    const std::string tok = out.empty() ? std::string(kEosToken) : out[0];
    ++counts[index.at(tok)];
  }
  EXPECT_GT(testing::chi_square_p(d.probs, counts, kN), 0.01);
}

// --- generate_candidates ---------------------------------------------------

TEST(GenerateCandidates, FanOutPrefixAndProvenance) {
  const auto ps = fixture_programs();
  const auto m = fit(ps);
  GenerationConfig cfg;
  cfg.rng_seed = 7;
  const auto& s = *ps[3];
  const auto out = generate_candidates(m, s, cfg, {"g1-1", 1});
  ASSERT_EQ(out.size(), 4u);
  for (std::size_t r = 0; r < out.size(); ++r) {
    const auto& q = out[r];
    EXPECT_EQ(q.id(), "g1-1-" + std::to_string(r + 1));
    ASSERT_GE(q.tokens().size(), 3u);
    EXPECT_TRUE(std::equal(s.tokens().begin(), s.tokens().begin() + 3, q.tokens().begin()));
    EXPECT_LE(q.tokens().size(), cfg.token_limit);
    EXPECT_EQ(q.provenance(), Provenance::kGenerated);
    EXPECT_EQ(q.parent_id(), s.id());
    EXPECT_EQ(q.origin_iteration(), 1);
  }
}

TEST(GenerateCandidates, HardTokenCap) {
  const auto ps = fixture_programs();
  const auto m = fit(ps);
  GenerationConfig cfg;
  cfg.token_limit = 5;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    cfg.rng_seed = j;
    for (const auto& q : generate_candidates(m, *ps[j], cfg, {"g", 1})) {
      EXPECT_LE(q.tokens().size(), 5u);
    }
  }
}

TEST(GenerateCandidates, PrefixAndBudgetProperty) {
  const auto ps = fixture_programs();
  const auto m = fit(ps);
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    GenerationConfig cfg;
    cfg.prefix_len = 1 + rng.below(6);
    cfg.token_limit = cfg.prefix_len + rng.below(120);
    cfg.candidates_per_seed = 1 + rng.below(4);
    cfg.temperature = 0.5 + rng.unit();
    cfg.rng_seed = rng.next();
    const auto& s = *ps[rng.below(ps.size())];
    const auto out = generate_candidates(m, s, cfg, {"g", 1});
    ASSERT_EQ(out.size(), cfg.candidates_per_seed);
    for (const auto& q : out) {
      ASSERT_GE(q.tokens().size(), cfg.prefix_len);
      EXPECT_TRUE(std::equal(s.tokens().begin(), s.tokens().begin() + cfg.prefix_len,
                             q.tokens().begin()));
      EXPECT_LE(q.tokens().size(), cfg.token_limit);
    }
  }
}

TEST(GenerateCandidates, SinglePathModelReproducesItsProgram) {
  const auto only = prog("only", "func.func @f ( ) { }");
  const auto m = fit({only});
  GenerationConfig cfg;
  int exact = 0, total = 0;
  for (std::uint64_t s = 0; s < 25; ++s) {
    cfg.rng_seed = s;
    for (const auto& q : generate_candidates(m, *only, cfg, {"g", 1})) {
      exact += q.text() == only->text();
      ++total;
    }
  }
  // Smoothing leaves about vocab * 1e-6 off-path mass per step.
  EXPECT_GE(exact, total - 1);
}

TEST(GenerateCandidates, SeedTooShort) {
  const auto m = fit(fixture_programs());
  const auto tiny = prog("t", "a b");
  try {
    generate_candidates(m, *tiny, GenerationConfig{}, {"g", 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSeedTooShort);
  }
}

TEST(GenerateCandidates, ConfigValidation) {
  GenerationConfig cfg;
  cfg.temperature = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.prefix_len = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.prefix_len = 700;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.candidates_per_seed = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(GenerateCandidates, DeterministicGivenSeed) {
  const auto ps = fixture_programs();
  const auto m = fit(ps);
  GenerationConfig cfg;
  cfg.rng_seed = 77;
  const auto a = generate_candidates(m, *ps[0], cfg, {"g", 1});
  const auto b = generate_candidates(m, *ps[0], cfg, {"g", 1});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].text(), b[i].text());
}

TEST(EndOfProgram, BraceBalanceClosure) {
  EndOfProgram eop;
  eop.feed(Tokens{"func.func", "@f", "(", ")", "{"});
  EXPECT_FALSE(eop.terminates("}"));
  eop.feed("}");
  EXPECT_EQ(eop.brace_depth(), 0);
  EXPECT_TRUE(eop.terminates("\n") || eop.terminates("func.func"));
  EXPECT_TRUE(eop.terminates(kEosToken));
}

// --- greedy ----------------------------------------------------------------

TEST(GenerateGreedy, ByteIdenticalAcrossRuns) {
  const auto ps = fixture_programs();
  const auto m = fit(ps);
  GenerationConfig cfg;
  cfg.prefix_len = kGreedyPrefixLen;
  cfg.candidates_per_seed = 1;
  for (const auto& s : ps) {
    const auto a = generate_greedy(m, *s, cfg, {"g", 1});
    cfg.rng_seed += 1;  // ignored by argmax decoding
    const auto b = generate_greedy(m, *s, cfg, {"g", 1});
    EXPECT_EQ(a.text(), b.text());
    EXPECT_EQ(a.id(), "g-1");
    EXPECT_TRUE(std::equal(s->tokens().begin(), s->tokens().begin() + 10, a.tokens().begin()));
  }
}

// Every 3-token context below occurs once, so each step has a unique argmax.
TEST(GenerateGreedy, FollowsTheUniqueMaximalPath) {
  const auto p = prog("p", "func.func @f ( %a : i32 ) -> i32 { return %a }");
  const auto m = fit({p}, 4);
  GenerationConfig cfg;
  cfg.prefix_len = 10;
  EXPECT_EQ(generate_greedy(m, *p, cfg, {"g", 1}).text(), p->text());
}

TEST(GenerateGreedy, TieGoesToSmallestToken) {
  // After "k" the model has seen "b" and "a" equally often.
  const auto ps = progs({"s s s s s s s s s k b", "s s s s s s s s s k a"});
  const auto m = fit(ps, 2);
  GenerationConfig cfg;
  cfg.prefix_len = 10;
  cfg.token_limit = 11;
  const auto q = generate_greedy(m, *ps[0], cfg, {"g", 1});
  ASSERT_EQ(q.tokens().size(), 11u);
  EXPECT_EQ(q.tokens().back(), "a");
}

TEST(GenerateGreedy, SeedTooShort) {
  const auto m = fit(fixture_programs());
  const auto s = prog("s", "func.func @f ( ) { }");
  GenerationConfig cfg;
  cfg.prefix_len = 10;
  EXPECT_THROW(generate_greedy(m, *s, cfg, {"g", 1}), Error);
}

}  // namespace
}  // namespace adaptfuzz::generator
