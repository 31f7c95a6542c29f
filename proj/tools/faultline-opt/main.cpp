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

// Standalone faultline compiler with an mlir-opt style command line:
//
//   faultline-opt [--spec spec.json] [-pass-flag] input.mlir
//
// The spec falls back to $FAULTLINE_SPEC. Other `--options` are accepted and
// ignored. Pass flags follow mlir-opt's single-dash convention, which is why
// this does not go through a general option parser.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <thread>

#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/harness/faultline.hpp"

namespace {

int usage() {
  std::cerr << "usage: faultline-opt [--spec spec.json] [-pass] <input.mlir | ->\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  using adaptfuzz::harness::FaultlineSpec;
  using adaptfuzz::harness::OutcomeKind;

  std::optional<std::string> spec_path;
  std::optional<std::string> pass;
  std::optional<std::string> input;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--spec") {
      if (++i >= argc) return usage();
      spec_path = argv[i];
    } else if (arg.rfind("--spec=", 0) == 0) {
      spec_path = arg.substr(7);
    } else if (arg.rfind("--", 0) == 0) {
      continue;
    } else if (arg.size() > 1 && arg[0] == '-') {
      if (pass) {
        std::cerr << "faultline-opt: only one pass per run is supported\n";
        return 2;
      }
      pass = arg;
    } else {
      if (input) return usage();
      input = arg;
    }
  }
  if (!input) return usage();
  if (!spec_path) {
    if (const char* env = std::getenv("FAULTLINE_SPEC")) spec_path = env;
  }

  try {
    const FaultlineSpec spec = spec_path ? FaultlineSpec::load(*spec_path) : FaultlineSpec{};
    std::string text;
    if (*input == "-") {
      text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
      text = adaptfuzz::read_file(*input);
    }
    const auto out = adaptfuzz::harness::faultline_compile(spec, text, pass);
    switch (out.kind) {
      case OutcomeKind::kValid:
        std::cout << out.stdout_text << std::flush;
        return 0;
      case OutcomeKind::kDiagnostic:
        std::cerr << out.stderr_text << std::flush;
        return 1;
      case OutcomeKind::kCrash:
        std::cerr << out.stderr_text << std::flush;
        std::abort();
      case OutcomeKind::kTimeout:
        for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
    }
  } catch (const adaptfuzz::Error& e) {
    std::cerr << "faultline-opt: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
