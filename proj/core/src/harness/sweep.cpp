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

#include "adaptfuzz/harness/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace adaptfuzz::harness {

ExecutionOutcome compile_check(const CompilerAdapter& compiler,
                               const corpus::TestProgram& q,
                               std::chrono::milliseconds timeout) {
  return compiler.run(q.text(), std::nullopt, timeout);
}

ExecutionOutcome run_pass(const CompilerAdapter& compiler,
                          const corpus::TestProgram& q, const PassSpec& pass,
                          std::chrono::milliseconds timeout) {
  return compiler.run(q.text(), pass.flag, timeout);
}

SweepResult sweep(const CompilerAdapter& compiler, const corpus::TestProgram& q,
                  const std::vector<PassSpec>& passes,
                  std::chrono::milliseconds timeout, std::size_t width) {
  SweepResult result;
  result.compile = compile_check(compiler, q, timeout);
  if (!result.compiled()) return result;

  result.passes.resize(passes.size());
  parallel_for(passes.size(), width, [&](std::size_t i) {
    result.passes[i] = PassOutcome{&passes[i], run_pass(compiler, q, passes[i], timeout)};
  });
  for (auto& po : result.passes) {
    if (po.outcome.kind == OutcomeKind::kValid && !po.outcome.stdout_text.empty()) {
      result.transformed.push_back(
          TransformedProgram{q.id(), po.pass->flag, po.outcome.stdout_text});
    }
  }
  return result;
}

void parallel_for(std::size_t n, std::size_t width,
                  const std::function<void(std::size_t)>& f) {
  width = std::max<std::size_t>(1, std::min(width, n));
  if (width == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  {
    std::vector<std::jthread> workers;
    workers.reserve(width);
    for (std::size_t w = 0; w < width; ++w) {
      workers.emplace_back([&] {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n) return;
          try {
            f(i);
          } catch (...) {
            std::lock_guard lock(error_mu);
            if (!first_error) first_error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace adaptfuzz::harness
