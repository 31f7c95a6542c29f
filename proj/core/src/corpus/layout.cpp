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

#include "adaptfuzz/corpus/layout.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "adaptfuzz/digest.hpp"
#include "adaptfuzz/error.hpp"

namespace adaptfuzz::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json manifest_entry(const TestProgram& p) {
  json j;
  j["id"] = p.id();
  j["provenance"] = to_string(p.provenance());
  j["origin_iteration"] = p.origin_iteration();
  j["parent_id"] = p.parent_id() ? json(*p.parent_id()) : json(nullptr);
  j["token_count"] = p.tokens().size();
  j["sha256"] = p.content_hash();
  return j;
}

std::vector<json> read_jsonl(const std::string& contents,
                             const std::string& origin) {
  std::vector<json> out;
  std::istringstream in(contents);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedInput,
                  origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

TestProgram program_from_entry(const json& e, std::string_view text,
                               const std::string& origin) {
  try {
    std::optional<std::string> parent;
    if (!e.at("parent_id").is_null()) {
      parent = e.at("parent_id").get<std::string>();
    }
    auto p = TestProgram::from_text(
        e.at("id").get<std::string>(), text,
        provenance_from_string(e.at("provenance").get<std::string>()),
        e.at("origin_iteration").get<int>(), std::move(parent));
    if (p.content_hash() != e.at("sha256").get<std::string>() ||
        p.tokens().size() != e.at("token_count").get<std::size_t>()) {
      throw Error(ErrorCode::kMalformedInput,
                  origin + ": content of " + p.id() +
                      " does not match its manifest entry");
    }
    return p;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kMalformedInput, origin + ": " + ex.what());
  } catch (const Error& ex) {
    if (ex.code() == ErrorCode::kMalformedInput) throw;
    throw Error(ErrorCode::kMalformedInput, origin + ": " + ex.what());
  }
}

}  // namespace

std::size_t save_corpus(const CorpusStore& store, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "cannot create " + dir.string() + ": " + ec.message());
  }
  const auto manifest_path = dir / kManifestFile;
  std::vector<json> existing;
  if (fs::exists(manifest_path)) {
    existing = read_jsonl(read_file(manifest_path), manifest_path.string());
  }
  const auto entries = store.entries();
  if (existing.size() > entries.size()) {
    throw Error(ErrorCode::kMalformedInput,
                manifest_path.string() + " has more entries than the store");
  }
  for (std::size_t i = 0; i < existing.size(); ++i) {
    if (existing[i].value("id", "") != entries[i]->id()) {
      throw Error(ErrorCode::kMalformedInput,
                  manifest_path.string() + " is not a prefix of the store");
    }
  }

  std::ofstream manifest(manifest_path, std::ios::app | std::ios::binary);
  if (!manifest) {
    throw Error(ErrorCode::kIoFailure, "cannot append " + manifest_path.string());
  }
  for (std::size_t i = existing.size(); i < entries.size(); ++i) {
    const auto& p = *entries[i];
    write_file_atomic(
        dir / std::string(to_string(p.provenance())) / (p.id() + ".mlir"),
        p.text());
    manifest << manifest_entry(p).dump() << '\n';
  }
  manifest.flush();
  if (!manifest) {
    throw Error(ErrorCode::kIoFailure, "write failed: " + manifest_path.string());
  }
  return entries.size() - existing.size();
}

CorpusStore load_corpus(const fs::path& dir) {
  const auto manifest_path = dir / kManifestFile;
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorCode::kMalformedInput,
                "missing " + manifest_path.string());
  }
  CorpusStore store;
  for (const auto& e :
       read_jsonl(read_file(manifest_path), manifest_path.string())) {
    const auto id = e.value("id", "");
    const auto prov = e.value("provenance", "");
    const auto file = dir / prov / (id + ".mlir");
    if (!fs::exists(file)) {
      throw Error(ErrorCode::kMalformedInput, "missing " + file.string());
    }
    store.add(program_from_entry(e, read_file(file), file.string()));
  }
  return store;
}

std::string serialize_snapshot(const CorpusStore& store) {
  std::string out;
  for (const auto& p : store.entries()) {
    auto j = manifest_entry(*p);
    j["text"] = p->text();
    out += j.dump();
    out += '\n';
  }
  return out;
}

CorpusStore parse_snapshot(const std::string& snapshot) {
  CorpusStore store;
  for (const auto& e : read_jsonl(snapshot, "corpus snapshot")) {
    if (!e.contains("text") || !e["text"].is_string()) {
      throw Error(ErrorCode::kMalformedInput, "corpus snapshot entry lacks text");
    }
    store.add(program_from_entry(e, e["text"].get<std::string>(),
                                 "corpus snapshot"));
  }
  return store;
}

}  // namespace adaptfuzz::corpus
