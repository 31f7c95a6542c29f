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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "adaptfuzz/corpus/program.hpp"
#include "adaptfuzz/harness/compiler.hpp"
#include "adaptfuzz/harness/pass_list.hpp"

namespace adaptfuzz::harness {

struct TransformedProgram {
  std::string source_id;
  std::string pass_flag;
  std::string output_text;  // non-empty, from a Valid run
};

struct PassOutcome {
  const PassSpec* pass;  // points into the list given to sweep()
  ExecutionOutcome outcome;
};

struct SweepResult {
  ExecutionOutcome compile;
  std::vector<PassOutcome> passes;  // empty unless compile is Valid
  std::vector<TransformedProgram> transformed;

  bool compiled() const { return compile.kind == OutcomeKind::kValid; }
};

ExecutionOutcome compile_check(const CompilerAdapter& compiler,
                               const corpus::TestProgram& q,
                               std::chrono::milliseconds timeout = kDefaultTimeout);

ExecutionOutcome run_pass(const CompilerAdapter& compiler,
                          const corpus::TestProgram& q, const PassSpec& pass,
                          std::chrono::milliseconds timeout = kDefaultTimeout);

/// Compile check, then every pass in list order if the check was Valid.
/// Crashes never stop the sweep; `width` > 1 runs passes concurrently with
/// results still in list order.
SweepResult sweep(const CompilerAdapter& compiler, const corpus::TestProgram& q,
                  const std::vector<PassSpec>& passes,
                  std::chrono::milliseconds timeout = kDefaultTimeout,
                  std::size_t width = 1);

/// Calls f(i) for every i in [0, n) on up to `width` threads. The first
/// exception thrown by any call is rethrown after all workers stop; calls not
/// yet started are skipped.
void parallel_for(std::size_t n, std::size_t width,
                  const std::function<void(std::size_t)>& f);

}  // namespace adaptfuzz::harness
