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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adaptfuzz/harness/outcome.hpp"

namespace adaptfuzz::harness {

inline constexpr std::chrono::milliseconds kDefaultTimeout{10'000};

/// Runs one program through a compiler, optionally under a single pass.
/// Implementations are stateless and safe to call from many threads.
class CompilerAdapter {
 public:
  virtual ~CompilerAdapter() = default;

  virtual ExecutionOutcome run(std::string_view program_text,
                               std::optional<std::string_view> pass_flag,
                               std::chrono::milliseconds timeout) const = 0;

  virtual std::string describe() const = 0;
};

struct ProcessCompilerConfig {
  std::filesystem::path binary;
  /// Inserted before the pass flag, e.g. `--allow-unregistered-dialect`.
  std::vector<std::string> leading_args;
  /// Added to the inherited environment.
  std::vector<std::pair<std::string, std::string>> env{
      {"LLVM_DISABLE_CRASH_REPORT", "1"}};
  std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
};

/// Invokes `<binary> <leading_args...> <pass_flag?> <input_file>` as a fresh
/// process per run, capturing stdout and stderr in full. On timeout the
/// whole process group is killed.
class ProcessCompiler final : public CompilerAdapter {
 public:
  /// Throws Error(kCompilerMissing) if the binary is not executable.
  explicit ProcessCompiler(ProcessCompilerConfig config);

  ExecutionOutcome run(std::string_view program_text,
                       std::optional<std::string_view> pass_flag,
                       std::chrono::milliseconds timeout) const override;

  std::string describe() const override;

 private:
  ProcessCompilerConfig config_;
};

}  // namespace adaptfuzz::harness
