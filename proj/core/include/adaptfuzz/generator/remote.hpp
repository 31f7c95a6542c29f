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
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "adaptfuzz/generator/backend.hpp"

namespace adaptfuzz::generator {

// Generator wire protocol, JSON over HTTP:
//
//   POST /generate {prefix_tokens: [string], max_new_tokens: int,
//                   temperature: float, num_samples: int, rng_seed: int}
//        -> {samples: [[string]]}          each sample excludes the prefix
//   POST /train    {programs: [string], epochs: int}
//        -> {status: "ok", heldout_nll: float}
//   GET  /health   -> {supports_training: bool, max_context: int}

struct Endpoint {
  std::string host;
  int port = 0;

  /// Accepts "http://host:port" or "host:port". Throws
  /// Error(kInvalidArgument).
  static Endpoint parse(std::string_view url);
  std::string to_string() const;
};

/// Client side of the wire protocol. Every failure to reach the server or
/// parse its answer surfaces as Error(kBackendUnavailable).
class HttpBackend final : public GeneratorBackend {
 public:
  /// Probes GET /health once; throws if the server is unreachable.
  explicit HttpBackend(Endpoint endpoint,
                       std::chrono::milliseconds timeout =
                           std::chrono::seconds(60));

  BackendCapabilities capabilities() const override { return caps_; }
  TrainOutcome train(std::span<const corpus::ProgramPtr> programs,
                     int epochs) const override;
  /// One /generate sample, truncated client-side at end of program.
  std::vector<Token> continue_program(
      std::span<const Token> prefix,
      const SamplingRequest& request) const override;

  /// Raw /generate call.
  std::vector<std::vector<Token>> generate(std::span<const Token> prefix,
                                           std::size_t max_new_tokens,
                                           double temperature,
                                           std::size_t num_samples,
                                           std::uint64_t rng_seed) const;

  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
  std::chrono::milliseconds timeout_;
  BackendCapabilities caps_;
};

/// Serves any local backend over the wire protocol. /train swaps in the
/// retrained backend; generation requests hold a reference to whichever
/// backend was current when they arrived.
class WireServer {
 public:
  explicit WireServer(BackendPtr backend);
  ~WireServer();
  WireServer(const WireServer&) = delete;
  WireServer& operator=(const WireServer&) = delete;

  /// Binds (port 0 picks a free one) and serves on a background thread.
  /// Returns the bound port. Throws Error(kIoFailure) if binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);

  /// Blocks serving on the calling thread.
  void listen_blocking(const std::string& host, int port);

  void stop();

  BackendPtr backend() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace adaptfuzz::generator
