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

#include <CLI11.hpp>
#include <iostream>

#include "adaptfuzz/error.hpp"
#include "commands.hpp"

namespace {

// 0 success, 1 usage, 2 environment, 3 data corruption.
int exit_code_for(adaptfuzz::ErrorCode code) {
  using adaptfuzz::ErrorCode;
  switch (code) {
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kCompilerMissing:
    case ErrorCode::kIoFailure:
      return 2;
    case ErrorCode::kCorruptCheckpoint:
    case ErrorCode::kMalformedInput:
    case ErrorCode::kMalformedCsv:
    case ErrorCode::kMalformedLine:
    case ErrorCode::kDuplicatePass:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptfuzz: self-adaptive fuzzing for MLIR-style compilers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "adaptfuzz 0.1.0");

  adaptfuzz::cli::Commands commands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    return commands.run();
  } catch (const adaptfuzz::Error& e) {
    std::cerr << "adaptfuzz: " << adaptfuzz::to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "adaptfuzz: " << e.what() << "\n";
    return 1;
  }
}
