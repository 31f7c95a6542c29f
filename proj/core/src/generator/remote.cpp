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

#include "adaptfuzz/generator/remote.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "adaptfuzz/error.hpp"
#include "adaptfuzz/rng.hpp"

namespace adaptfuzz::generator {

using nlohmann::json;

Endpoint Endpoint::parse(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) == kScheme) url.remove_prefix(kScheme.size());
  while (!url.empty() && url.back() == '/') url.remove_suffix(1);
  const auto colon = url.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == url.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected http://host:port, got '" + std::string(url) + "'");
  }
  Endpoint e;
  e.host = std::string(url.substr(0, colon));
  try {
    std::size_t used = 0;
    const std::string port(url.substr(colon + 1));
    e.port = std::stoi(port, &used);
    if (used != port.size() || e.port <= 0 || e.port > 65535) throw 0;
  } catch (...) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad port in '" + std::string(url) + "'");
  }
  return e;
}

std::string Endpoint::to_string() const {
  return "http://" + host + ":" + std::to_string(port);
}

namespace {

httplib::Client make_client(const Endpoint& e,
                            std::chrono::milliseconds timeout) {
  httplib::Client cli(e.host, e.port);
  cli.set_connection_timeout(std::chrono::seconds(5));
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli;
}

json checked_json(const httplib::Result& res, const Endpoint& e,
                  std::string_view route) {
  if (!res) {
    throw Error(ErrorCode::kBackendUnavailable,
                e.to_string() + std::string(route) + ": " +
                    httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                e.to_string() + std::string(route) + ": HTTP " +
                    std::to_string(res->status) + " " + res->body);
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kBackendUnavailable,
                e.to_string() + std::string(route) + ": bad JSON: " + ex.what());
  }
}

}  // namespace

HttpBackend::HttpBackend(Endpoint endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {
  auto cli = make_client(endpoint_, timeout_);
  const auto j = checked_json(cli.Get("/health"), endpoint_, "/health");
  try {
    caps_.supports_training = j.at("supports_training").get<bool>();
    caps_.max_context = j.at("max_context").get<std::size_t>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_.to_string() + "/health: " + ex.what());
  }
}

TrainOutcome HttpBackend::train(std::span<const corpus::ProgramPtr> programs,
                                int epochs) const {
  if (programs.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "training set is empty");
  }
  json body;
  body["epochs"] = epochs;
  body["programs"] = json::array();
  for (const auto& p : programs) body["programs"].push_back(p->text());
  auto cli = make_client(endpoint_, timeout_);
  const auto j = checked_json(
      cli.Post("/train", body.dump(), "application/json"), endpoint_, "/train");
  try {
    if (j.at("status") != "ok") {
      throw Error(ErrorCode::kBackendUnavailable,
                  endpoint_.to_string() + "/train: status " + j.at("status").dump());
    }
    return {std::make_shared<const HttpBackend>(*this),
            j.at("heldout_nll").get<double>()};
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_.to_string() + "/train: " + ex.what());
  }
}

std::vector<std::vector<Token>> HttpBackend::generate(
    std::span<const Token> prefix, std::size_t max_new_tokens,
    double temperature, std::size_t num_samples, std::uint64_t rng_seed) const {
  json body;
  body["prefix_tokens"] = std::vector<Token>(prefix.begin(), prefix.end());
  body["max_new_tokens"] = max_new_tokens;
  body["temperature"] = temperature;
  body["num_samples"] = num_samples;
  body["rng_seed"] = rng_seed;
  auto cli = make_client(endpoint_, timeout_);
  const auto j = checked_json(
      cli.Post("/generate", body.dump(), "application/json"), endpoint_,
      "/generate");
  try {
    return j.at("samples").get<std::vector<std::vector<Token>>>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_.to_string() + "/generate: " + ex.what());
  }
}

std::vector<Token> HttpBackend::continue_program(
    std::span<const Token> prefix, const SamplingRequest& request) const {
  auto samples = generate(prefix, request.max_new_tokens, request.temperature,
                          1, request.rng_seed);
  if (samples.size() != 1) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_.to_string() + "/generate: expected 1 sample");
  }
  EndOfProgram eop;
  eop.feed(prefix);
  std::vector<Token> out;
  for (auto& t : samples.front()) {
    if (out.size() >= request.max_new_tokens || eop.terminates(t)) break;
    eop.feed(t);
    out.push_back(std::move(t));
  }
  return out;
}

struct WireServer::Impl {
  httplib::Server server;
  mutable std::mutex mu;
  BackendPtr backend;
  std::mutex train_mu;  // /train is exclusive

  BackendPtr current() const {
    std::scoped_lock lock(mu);
    return backend;
  }
};

WireServer::WireServer(BackendPtr backend) : impl_(std::make_unique<Impl>()) {
  impl_->backend = std::move(backend);
  auto* impl = impl_.get();

  impl->server.Get("/health", [impl](const httplib::Request&,
                                     httplib::Response& res) {
    const auto caps = impl->current()->capabilities();
    json j{{"supports_training", caps.supports_training},
           {"max_context", caps.max_context}};
    res.set_content(j.dump(), "application/json");
  });

  impl->server.Post("/generate", [impl](const httplib::Request& req,
                                        httplib::Response& res) {
    try {
      const auto j = json::parse(req.body);
      const auto prefix = j.at("prefix_tokens").get<std::vector<Token>>();
      SamplingRequest sr;
      sr.max_new_tokens = j.at("max_new_tokens").get<std::size_t>();
      sr.temperature = j.at("temperature").get<double>();
      const auto n = j.at("num_samples").get<std::size_t>();
      const auto seed = j.at("rng_seed").get<std::uint64_t>();
      const auto backend = impl->current();
      json samples = json::array();
      for (std::size_t i = 0; i < n; ++i) {
        // Sample 0 uses the request seed as-is so a one-sample request matches
        // a local continue_program call with the same seed.
        sr.rng_seed = i == 0 ? seed : derive_seed({seed, i});
        samples.push_back(backend->continue_program(prefix, sr));
      }
      res.set_content(json{{"samples", samples}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });

  impl->server.Post("/train", [impl](const httplib::Request& req,
                                     httplib::Response& res) {
    std::unique_lock busy(impl->train_mu, std::try_to_lock);
    if (!busy.owns_lock()) {
      res.status = 409;
      res.set_content(json{{"error", "training in progress"}}.dump(),
                      "application/json");
      return;
    }
    try {
      const auto j = json::parse(req.body);
      const auto texts = j.at("programs").get<std::vector<std::string>>();
      const int epochs = j.at("epochs").get<int>();
      std::vector<corpus::ProgramPtr> programs;
      for (std::size_t i = 0; i < texts.size(); ++i) {
        programs.push_back(std::make_shared<const corpus::TestProgram>(
            corpus::TestProgram::from_text("w" + std::to_string(i), texts[i],
                                           corpus::Provenance::kSeed, 0,
                                           std::nullopt)));
      }
      auto outcome = impl->current()->train(programs, epochs);
      {
        std::scoped_lock lock(impl->mu);
        impl->backend = outcome.backend;
      }
      res.set_content(
          json{{"status", "ok"}, {"heldout_nll", outcome.heldout_nll}}.dump(),
          "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
}

WireServer::~WireServer() { stop(); }

int WireServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kIoFailure,
                "cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void WireServer::listen_blocking(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIoFailure,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void WireServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

BackendPtr WireServer::backend() const { return impl_->current(); }

}  // namespace adaptfuzz::generator
