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

#include "adaptfuzz/harness/faultline.hpp"

#include <signal.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <set>

#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"
#include "adaptfuzz/rng.hpp"

namespace adaptfuzz::harness {

using corpus::Token;
using nlohmann::json;

namespace {

std::vector<std::string> string_array(const json& j, const char* key,
                                      bool required) {
  std::vector<std::string> out;
  if (!j.contains(key)) {
    if (required) {
      throw Error(ErrorCode::kMalformedInput,
                  std::string("faultline spec: missing '") + key + "'");
    }
    return out;
  }
  for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  return out;
}

void require_nonempty(const std::string& v, const char* what) {
  if (v.empty()) {
    throw Error(ErrorCode::kMalformedInput,
                std::string("faultline spec: empty ") + what);
  }
}

// "-convert-vector-to-llvm" -> "ConvertVectorToLlvm"
std::string camel_from_flag(std::string_view flag) {
  std::string out;
  bool upper = true;
  for (char c : flag) {
    if (c == '-' || c == '_' || c == '=' || c == '.') {
      upper = true;
      continue;
    }
    if (!std::isalnum(static_cast<unsigned char>(c))) continue;
    out.push_back(upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
    upper = false;
  }
  return out.empty() ? "Anonymous" : out;
}

std::string hex_address(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(0x0000550000000000ULL |
                                                (v & 0xffffffffffULL)));
  return buf;
}

std::string crash_stderr(const FaultRule& fault, std::string_view text) {
  const auto pass_name = camel_from_flag(fault.pass);
  // Line numbers and addresses move with the input so that only the
  // assertion text is stable across occurrences.
  const std::uint64_t salt = fnv1a64(text);
  const std::uint64_t sig_hash = fnv1a64(fault.crash_signature);
  const unsigned line = 100 + static_cast<unsigned>(salt % 900);

  std::string err;
  err += "faultline-opt: /src/llvm-project/mlir/lib/Transforms/" + pass_name +
         ".cpp:" + std::to_string(line) + ": void mlir::" + pass_name +
         "::runOnOperation(): Assertion '" + fault.crash_signature +
         "' failed.\n";
  err += "PLEASE submit a bug report to https://github.com/llvm/llvm-project/issues/ "
         "and include the crash backtrace.\n";
  err += "Stack dump:\n";
  err += "0.\tProgram arguments: faultline-opt " + fault.pass + " input.mlir\n";

  std::vector<std::string> frames{
      "llvm::sys::PrintStackTrace(llvm::raw_ostream&, int)",
      "llvm::sys::RunSignalHandlers()",
      "abort",
      "mlir::" + pass_name + "::runOnOperation()",
      "mlir::detail::OpToOpPassAdaptor::run(mlir::Pass*, mlir::Operation*, "
      "mlir::AnalysisManager, bool, unsigned int)",
      "mlir::PassManager::run(mlir::Operation*)",
      "mlir::MlirOptMain(int, char**, llvm::StringRef, mlir::DialectRegistry&)",
      "main"};
  if (sig_hash % 2 == 0) {
    frames.insert(frames.begin() + 4,
                  "mlir::detail::walk(mlir::Operation*, llvm::function_ref<void "
                  "(mlir::Operation*)>, mlir::WalkOrder)");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto addr = splitmix64(salt ^ (sig_hash + i));
    err += " #" + std::to_string(i) + " " + hex_address(addr) + " " + frames[i] +
           " +" + std::to_string(16 + addr % 4000) + "\n";
  }
  return err;
}

bool identifier_like(std::string_view t) {
  if (t.empty() || !std::isalpha(static_cast<unsigned char>(t[0]))) return false;
  return std::all_of(t.begin(), t.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

std::string make_signature(Rng& rng, std::size_t k) {
  static constexpr const char* kNouns[] = {"op",     "region", "block", "value",
                                           "attr",   "type",   "operand", "result",
                                           "layout", "map"};
  static constexpr const char* kTypes[] = {"MemRefType", "RankedTensorType",
                                           "IntegerType", "FloatType",
                                           "VectorType",  "ShapedType"};
  const std::string noun = kNouns[rng.below(std::size(kNouns))];
  const std::string name = noun + std::to_string(k);
  switch (rng.below(4)) {
    case 0: return name + " != nullptr";
    case 1: return name + ".size() == " + std::to_string(1 + rng.below(4));
    case 2: return "!" + name + ".empty() && \"expected non-empty " + noun + "\"";
    default:
      return "isa<" + std::string(kTypes[rng.below(std::size(kTypes))]) + ">(" +
             name + ") && \"unexpected " + noun + " kind\"";
  }
}

}  // namespace

FaultlineSpec FaultlineSpec::from_json(std::string_view json_text) {
  FaultlineSpec spec;
  try {
    const auto j = json::parse(json_text);
    if (!j.is_object()) {
      throw Error(ErrorCode::kMalformedInput, "faultline spec: expected an object");
    }
    spec.grammar_keywords = string_array(j, "grammar_keywords", true);
    if (spec.grammar_keywords.empty()) {
      throw Error(ErrorCode::kMalformedInput,
                  "faultline spec: grammar_keywords is empty");
    }
    for (const auto& f : j.value("faults", json::array())) {
      FaultRule rule{f.at("pass").get<std::string>(),
                     f.at("trigger_token").get<std::string>(),
                     f.at("crash_signature").get<std::string>()};
      require_nonempty(rule.pass, "fault pass");
      require_nonempty(rule.trigger_token, "trigger_token");
      require_nonempty(rule.crash_signature, "crash_signature");
      spec.faults.push_back(std::move(rule));
    }
    for (const auto& r : j.value("rewrites", json::array())) {
      RewriteRule rule{r.at("from_token").get<std::string>(),
                       r.at("to_token").get<std::string>(), std::nullopt};
      if (r.contains("pass") && !r.at("pass").is_null()) {
        rule.pass = r.at("pass").get<std::string>();
      }
      require_nonempty(rule.from_token, "from_token");
      require_nonempty(rule.to_token, "to_token");
      spec.rewrites.push_back(std::move(rule));
    }
    spec.hang_passes = string_array(j, "hang_passes", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedInput,
                std::string("faultline spec: ") + e.what());
  }
  return spec;
}

std::string FaultlineSpec::to_json() const {
  json j;
  j["grammar_keywords"] = grammar_keywords;
  j["faults"] = json::array();
  for (const auto& f : faults) {
    j["faults"].push_back({{"pass", f.pass},
                           {"trigger_token", f.trigger_token},
                           {"crash_signature", f.crash_signature}});
  }
  j["rewrites"] = json::array();
  for (const auto& r : rewrites) {
    json o{{"from_token", r.from_token}, {"to_token", r.to_token}};
    if (r.pass) o["pass"] = *r.pass;
    j["rewrites"].push_back(std::move(o));
  }
  j["hang_passes"] = hang_passes;
  return j.dump(2) + "\n";
}

FaultlineSpec FaultlineSpec::load(const std::filesystem::path& path) {
  try {
    return from_json(read_file(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMalformedInput) throw;
    throw Error(ErrorCode::kMalformedInput, path.string() + ": " + e.what());
  }
}

bool faultline_accepts(const FaultlineSpec& spec, const std::vector<Token>& tokens) {
  auto first = std::find_if(tokens.begin(), tokens.end(),
                            [](const Token& t) { return !corpus::is_newline(t); });
  if (first == tokens.end()) return false;
  if (std::find(spec.grammar_keywords.begin(), spec.grammar_keywords.end(),
                *first) == spec.grammar_keywords.end()) {
    return false;
  }
  std::string stack;
  for (const auto& t : tokens) {
    if (t.size() != 1) continue;
    switch (t[0]) {
      case '(': stack.push_back(')'); break;
      case '[': stack.push_back(']'); break;
      case '{': stack.push_back('}'); break;
      case ')':
      case ']':
      case '}':
        if (stack.empty() || stack.back() != t[0]) return false;
        stack.pop_back();
        break;
      default: break;
    }
  }
  return stack.empty();
}

const FaultRule* faultline_match(const FaultlineSpec& spec,
                                 const std::vector<Token>& tokens,
                                 std::string_view pass_flag) {
  for (const auto& f : spec.faults) {
    if (f.pass != pass_flag) continue;
    if (std::find(tokens.begin(), tokens.end(), f.trigger_token) != tokens.end()) {
      return &f;
    }
  }
  return nullptr;
}

ExecutionOutcome faultline_compile(const FaultlineSpec& spec, std::string_view text,
                                   std::optional<std::string_view> pass_flag,
                                   std::chrono::milliseconds timeout) {
  ExecutionOutcome out;
  auto tokens = corpus::tokenize(text);
  if (!faultline_accepts(spec, tokens)) {
    out.kind = OutcomeKind::kDiagnostic;
    out.exit_code = 1;
    out.stderr_text =
        "input.mlir:1:1: error: custom op or keyword expected, or unbalanced "
        "delimiters\n";
    return out;
  }
  if (!pass_flag) {
    out.kind = OutcomeKind::kValid;
    out.exit_code = 0;
    out.stdout_text = corpus::detokenize(tokens) + "\n";
    return out;
  }
  if (std::find(spec.hang_passes.begin(), spec.hang_passes.end(), *pass_flag) !=
      spec.hang_passes.end()) {
    out.kind = OutcomeKind::kTimeout;
    out.wall_time = timeout;
    return out;
  }
  if (const auto* fault = faultline_match(spec, tokens, *pass_flag)) {
    out.kind = OutcomeKind::kCrash;
    out.signal = SIGABRT;
    out.stderr_text = crash_stderr(*fault, text);
    return out;
  }
  for (const auto& r : spec.rewrites) {
    if (r.pass && *r.pass != *pass_flag) continue;
    std::replace(tokens.begin(), tokens.end(), r.from_token, r.to_token);
  }
  out.kind = OutcomeKind::kValid;
  out.exit_code = 0;
  out.stdout_text = corpus::detokenize(tokens) + "\n";
  return out;
}

ExecutionOutcome FaultlineCompiler::run(std::string_view program_text,
                                        std::optional<std::string_view> pass_flag,
                                        std::chrono::milliseconds timeout) const {
  return faultline_compile(spec_, program_text, pass_flag, timeout);
}

FaultlineSpec random_faultline_spec(const std::vector<Token>& token_pool,
                                    const std::vector<PassSpec>& passes,
                                    const FaultlineGenOptions& options) {
  FaultlineSpec spec;
  std::set<std::string> unique;
  for (const auto& t : token_pool) {
    if (identifier_like(t) &&
        std::find(spec.grammar_keywords.begin(), spec.grammar_keywords.end(), t) ==
            spec.grammar_keywords.end()) {
      unique.insert(t);
    }
  }
  const std::vector<std::string> pool(unique.begin(), unique.end());
  if (pool.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "faultline-gen: empty token pool");
  }
  if (passes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "faultline-gen: empty pass list");
  }

  Rng rng(options.rng_seed);
  auto pick_pass = [&] { return passes[rng.below(passes.size())].flag; };

  for (std::size_t k = 0; k < options.rewrite_count; ++k) {
    spec.rewrites.push_back(RewriteRule{pool[rng.below(pool.size())],
                                        "fl.mutant" + std::to_string(k),
                                        pick_pass()});
  }
  for (std::size_t k = 0; k < options.fault_count; ++k) {
    FaultRule f;
    f.pass = pick_pass();
    const bool from_rewrite = !spec.rewrites.empty() &&
                              rng.unit() < options.rewrite_trigger_fraction;
    f.trigger_token = from_rewrite
                          ? spec.rewrites[rng.below(spec.rewrites.size())].to_token
                          : pool[rng.below(pool.size())];
    if (!spec.faults.empty() && rng.unit() < options.shared_signature_rate) {
      f.crash_signature = spec.faults[rng.below(spec.faults.size())].crash_signature;
    } else {
      f.crash_signature = make_signature(rng, k);
    }
    spec.faults.push_back(std::move(f));
  }
  std::set<std::string> hangs;
  while (hangs.size() < std::min(options.hang_count, passes.size())) {
    hangs.insert(pick_pass());
  }
  spec.hang_passes.assign(hangs.begin(), hangs.end());
  return spec;
}

}  // namespace adaptfuzz::harness
