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

// faultline is a toy stand-in for mlir-opt with injected, fully known
// defects. Given the same spec and input it always behaves the same way, so
// campaigns against it have a ground truth to check against.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptfuzz/corpus/tokenizer.hpp"
#include "adaptfuzz/harness/compiler.hpp"
#include "adaptfuzz/harness/pass_list.hpp"

namespace adaptfuzz::harness {

struct FaultRule {
  std::string pass;             // pass flag, e.g. "-canonicalize"
  std::string trigger_token;    // exact token text
  std::string crash_signature;  // assertion expression

  bool operator==(const FaultRule&) const = default;
};

struct RewriteRule {
  std::string from_token;
  std::string to_token;
  /// When set, the rewrite only happens under this pass.
  std::optional<std::string> pass;

  bool operator==(const RewriteRule&) const = default;
};

struct FaultlineSpec {
  std::vector<std::string> grammar_keywords{"module", "func.func"};
  std::vector<FaultRule> faults;
  std::vector<RewriteRule> rewrites;
  std::vector<std::string> hang_passes;

  bool operator==(const FaultlineSpec&) const = default;

  /// Throws Error(kMalformedInput) on schema violations.
  static FaultlineSpec from_json(std::string_view json_text);
  std::string to_json() const;

  static FaultlineSpec load(const std::filesystem::path& path);
};

/// Program validity under the toy grammar: at least one token, the first
/// non-newline token is a grammar keyword, and (), [], {} nest properly.
bool faultline_accepts(const FaultlineSpec& spec,
                       const std::vector<corpus::Token>& tokens);

/// The first fault, in spec order, whose pass matches and whose trigger
/// occurs in the tokens.
const FaultRule* faultline_match(const FaultlineSpec& spec,
                                 const std::vector<corpus::Token>& tokens,
                                 std::string_view pass_flag);

/// Pure simulation of one compiler run. Rules, first match wins:
///  1. grammar rejects the program: Diagnostic, exit 1, `error:` on stderr.
///  2. no pass: Valid, stdout is the canonical text.
///  3. pass in hang_passes: Timeout (wall_time is reported as `timeout`).
///  4. a fault matches: Crash by SIGABRT with `Assertion '<sig>' failed.`, a
///     bug-report banner and a stack dump whose frames start with `mlir::`.
///  5. otherwise Valid, stdout is the text after applying rewrites.
ExecutionOutcome faultline_compile(const FaultlineSpec& spec,
                                   std::string_view text,
                                   std::optional<std::string_view> pass_flag,
                                   std::chrono::milliseconds timeout = kDefaultTimeout);

/// In-process adapter over faultline_compile.
class FaultlineCompiler final : public CompilerAdapter {
 public:
  explicit FaultlineCompiler(FaultlineSpec spec) : spec_(std::move(spec)) {}

  ExecutionOutcome run(std::string_view program_text,
                       std::optional<std::string_view> pass_flag,
                       std::chrono::milliseconds timeout) const override;
  std::string describe() const override { return "faultline"; }

  const FaultlineSpec& spec() const { return spec_; }

 private:
  FaultlineSpec spec_;
};

struct FaultlineGenOptions {
  std::uint64_t rng_seed = 0;
  std::size_t fault_count = 12;
  std::size_t rewrite_count = 4;
  std::size_t hang_count = 0;
  /// Fraction of faults whose trigger is a token introduced by a rewrite
  /// rather than one drawn from the corpus.
  double rewrite_trigger_fraction = 0.25;
  /// Chance that a fault reuses an earlier fault's signature.
  double shared_signature_rate = 0.0;
};

/// Draws a random spec. Triggers and rewrite sources are drawn from
/// `token_pool` (identifier-like tokens only), passes from `passes`.
/// Deterministic in (token_pool, passes, options).
FaultlineSpec random_faultline_spec(const std::vector<corpus::Token>& token_pool,
                                    const std::vector<PassSpec>& passes,
                                    const FaultlineGenOptions& options);

}  // namespace adaptfuzz::harness
