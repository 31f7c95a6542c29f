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

#include "adaptfuzz/campaign/config.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "adaptfuzz/error.hpp"

namespace adaptfuzz::campaign {

using nlohmann::json;

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kPerturbed: return "Perturbed";
    case Mode::kGreedyAblation: return "GreedyAblation";
    case Mode::kNoAugmentationAblation: return "NoAugmentationAblation";
  }
  return "Perturbed";
}

Mode mode_from_string(std::string_view name) {
  for (auto m : {Mode::kPerturbed, Mode::kGreedyAblation,
                 Mode::kNoAugmentationAblation}) {
    if (to_string(m) == name) return m;
  }
  throw Error(ErrorCode::kConfigInvalid, "mode: unknown value '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kConfigInvalid, field + ": " + why);
}

double seconds(std::chrono::milliseconds ms) {
  return static_cast<double>(ms.count()) / 1000.0;
}

std::chrono::milliseconds from_seconds(const json& v, const char* field) {
  if (!v.is_number()) invalid(field, "expected a number of seconds");
  const double s = v.get<double>();
  if (!std::isfinite(s) || s < 0) invalid(field, "must be finite and >= 0");
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(s * 1000.0)));
}

template <typename T>
T get_count(const json& v, const char* field) {
  if (!v.is_number_integer()) invalid(field, "expected an integer");
  if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
  const auto i = v.get<std::int64_t>();
  if (i < 0) invalid(field, "must be >= 0");
  return static_cast<T>(i);
}

}  // namespace

void CampaignConfig::validate() const {
  if (max_iterations < 1) invalid("max_iterations", "must be >= 1");
  if (epochs < 1) invalid("epochs", "must be >= 1");
  if (max_seed_samples < 1) invalid("max_seed_samples", "must be >= 1");
  if (token_limit < 1) invalid("token_limit", "must be >= 1");
  if (!(temperature > 0) || !std::isfinite(temperature)) {
    invalid("temperature", "must be a positive finite number");
  }
  if (prefix_len < 1) invalid("prefix_len", "must be >= 1");
  if (candidates_per_seed < 1) invalid("candidates_per_seed", "must be >= 1");
  if (worker_pool_width < 1) invalid("worker_pool_width", "must be >= 1");
  if (timeout.count() < 1) invalid("timeout", "must be positive");
  if (sweep_batch < 1) invalid("sweep_batch", "must be >= 1");
  if (ngram_order < 1) invalid("ngram_order", "must be >= 1");
  const auto eff = effective();
  if (eff.prefix_len > eff.token_limit) {
    invalid("prefix_len", "must not exceed token_limit");
  }
}

CampaignConfig CampaignConfig::effective() const {
  CampaignConfig c = *this;
  if (c.mode == Mode::kGreedyAblation) {
    c.prefix_len = generator::kGreedyPrefixLen;
    c.candidates_per_seed = 1;
  }
  return c;
}

generator::GenerationConfig CampaignConfig::generation(std::uint64_t seed) const {
  const auto eff = effective();
  generator::GenerationConfig g;
  g.temperature = eff.temperature;
  g.prefix_len = eff.prefix_len;
  g.candidates_per_seed = eff.candidates_per_seed;
  g.token_limit = eff.token_limit;
  g.rng_seed = seed;
  return g;
}

std::string CampaignConfig::to_json() const {
  json j;
  j["max_iterations"] = max_iterations;
  j["epochs"] = epochs;
  j["max_seed_samples"] = max_seed_samples;
  j["token_limit"] = token_limit;
  j["temperature"] = temperature;
  j["prefix_len"] = prefix_len;
  j["candidates_per_seed"] = candidates_per_seed;
  j["wall_clock_budget"] =
      wall_clock_budget ? json(seconds(*wall_clock_budget)) : json(nullptr);
  j["worker_pool_width"] = worker_pool_width;
  j["rng_seed"] = rng_seed;
  j["mode"] = to_string(mode);
  j["timeout"] = seconds(timeout);
  j["clock"] = clock == ClockKind::kWall ? "wall" : "logical";
  j["sweep_batch"] = sweep_batch;
  j["ngram_order"] = ngram_order;
  j["frame_prefixes"] = frame_prefixes;
  return j.dump(2) + "\n";
}

CampaignConfig CampaignConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfigInvalid, "config: expected an object");

  CampaignConfig c;
  for (const auto& [key, v] : j.items()) {
    const char* k = key.c_str();
    if (key == "max_iterations") {
      c.max_iterations = get_count<int>(v, k);
    } else if (key == "epochs") {
      c.epochs = get_count<int>(v, k);
    } else if (key == "max_seed_samples") {
      c.max_seed_samples = get_count<std::size_t>(v, k);
    } else if (key == "token_limit") {
      c.token_limit = get_count<std::size_t>(v, k);
    } else if (key == "temperature") {
      if (!v.is_number()) invalid(key, "expected a number");
      c.temperature = v.get<double>();
    } else if (key == "prefix_len") {
      c.prefix_len = get_count<std::size_t>(v, k);
    } else if (key == "candidates_per_seed") {
      c.candidates_per_seed = get_count<std::size_t>(v, k);
    } else if (key == "wall_clock_budget") {
      if (v.is_null()) {
        c.wall_clock_budget.reset();
      } else {
        c.wall_clock_budget = from_seconds(v, k);
      }
    } else if (key == "worker_pool_width") {
      c.worker_pool_width = get_count<std::size_t>(v, k);
    } else if (key == "rng_seed") {
      c.rng_seed = get_count<std::uint64_t>(v, k);
    } else if (key == "mode") {
      if (!v.is_string()) invalid(key, "expected a string");
      c.mode = mode_from_string(v.get<std::string>());
    } else if (key == "timeout") {
      c.timeout = from_seconds(v, k);
    } else if (key == "clock") {
      if (v == "wall") {
        c.clock = ClockKind::kWall;
      } else if (v == "logical") {
        c.clock = ClockKind::kLogical;
      } else {
        invalid(key, "expected \"wall\" or \"logical\"");
      }
    } else if (key == "sweep_batch") {
      c.sweep_batch = get_count<std::size_t>(v, k);
    } else if (key == "ngram_order") {
      c.ngram_order = get_count<std::size_t>(v, k);
    } else if (key == "frame_prefixes") {
      if (!v.is_array()) invalid(key, "expected an array of strings");
      c.frame_prefixes.clear();
      for (const auto& p : v) {
        if (!p.is_string()) invalid(key, "expected an array of strings");
        c.frame_prefixes.push_back(p.get<std::string>());
      }
    } else {
      invalid(key, "unknown field");
    }
  }
  c.validate();
  return c;
}

void CampaignConfig::apply_overrides(const std::map<std::string, std::string>& overrides) {
  auto j = json::parse(to_json());
  for (const auto& [key, raw] : overrides) {
    if (!j.contains(key)) invalid(key, "unknown field");
    try {
      j[key] = json::parse(raw);
    } catch (const json::exception&) {
      j[key] = raw;
    }
  }
  *this = from_json(j.dump());
}

}  // namespace adaptfuzz::campaign
