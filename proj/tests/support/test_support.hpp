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

#include <filesystem>
#include <string>
#include <vector>

#include "adaptfuzz/corpus/store.hpp"
#include "adaptfuzz/harness/pass_list.hpp"

namespace adaptfuzz::testing {

std::filesystem::path fixture_dir();
std::filesystem::path fixture(const std::string& relative);

/// Every shipped .mlir fixture, sorted by name.
std::vector<std::filesystem::path> mlir_fixtures();

/// All units split out of the shipped fixtures.
corpus::CorpusStore fixture_corpus();

/// The first `n` fixture units in file order.
corpus::CorpusStore fixture_corpus(std::size_t n);

std::vector<harness::PassSpec> fixture_passes();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Text of every regular file under `dir`, keyed by relative path.
std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& dir);

}  // namespace adaptfuzz::testing
