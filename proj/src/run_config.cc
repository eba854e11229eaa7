// Copyright 2026 The Chunkforge Authors.
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

#include "chunkforge/run_config.h"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "chunkforge/errors.h"
#include "chunkforge/tokenizer.h"
#include "json.hpp"

namespace chunkforge {
namespace {

using nlohmann::json;

void RejectUnknown(const json& object, std::string_view section,
                   std::initializer_list<std::string_view> known) {
  if (!object.is_object()) {
    throw ValidationError("config section '" + std::string(section) +
                          "' must be an object");
  }
  for (const auto& [key, value] : object.items()) {
    bool found = false;
    for (std::string_view k : known) found = found || key == k;
    if (!found) {
      throw ValidationError("unknown config key '" + std::string(section) +
                            (section.empty() ? "" : ".") + key + "'");
    }
  }
}

template <typename T>
void Read(const json& object, const char* key, T& out) {
  if (!object.contains(key)) return;
  try {
    out = object.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config key '") + key +
                          "' has the wrong type");
  }
}

void ReadOptionalString(const json& object, const char* key,
                        std::optional<std::string>& out) {
  if (!object.contains(key)) return;
  if (object.at(key).is_null()) {
    out.reset();
    return;
  }
  std::string value;
  Read(object, key, value);
  out = value;
}

}  // namespace

void RunConfig::Validate() const {
  EffectiveScorer().Validate();
  chunker.Validate();
  if (window.capacity_tokens < 1) throw ValidationError("capacity must be positive");
  if (!(window.overlap_ratio >= 0.0 && window.overlap_ratio < 0.5)) {
    throw ValidationError("overlap ratio must lie in [0, 0.5)");
  }
  if (workers < 1) throw ValidationError("workers must be at least 1");
  if (separator_prefix.empty()) throw ValidationError("separator prefix is empty");
  MakeTokenizer(tokenizer);
}

ScorerConfig RunConfig::EffectiveScorer() const {
  ScorerConfig config = scorer;
  config.capacity_tokens = window.capacity_tokens;
  return config;
}

std::string RunConfig::ToJson() const {
  nlohmann::ordered_json j;
  auto& s = j["scorer"];
  s["kind"] = KindName(scorer.kind);
  s["endpoint"] = scorer.endpoint ? json(*scorer.endpoint) : json(nullptr);
  s["prob_file"] = scorer.prob_file ? json(*scorer.prob_file) : json(nullptr);
  s["seed"] = scorer.seed;
  j["window"] = {{"capacity_tokens", window.capacity_tokens},
                 {"overlap_ratio", window.overlap_ratio}};
  j["chunker"] = {{"t1", chunker.t1},
                  {"max_tokens", chunker.max_tokens},
                  {"min_tokens", chunker.min_tokens}};
  j["search"] = {{"top_k", top_k}};
  j["tokenizer"] = tokenizer;
  j["separator_prefix"] = separator_prefix;
  j["workers"] = workers;
  return j.dump(2);
}

void RunConfig::MergeJson(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  RejectUnknown(j, "", {"scorer", "window", "chunker", "search", "tokenizer",
                        "separator_prefix", "workers"});
  if (j.contains("scorer")) {
    const json& s = j["scorer"];
    RejectUnknown(s, "scorer", {"kind", "endpoint", "prob_file", "seed"});
    if (s.contains("kind")) {
      std::string kind;
      Read(s, "kind", kind);
      scorer.kind = ParseScorerKind(kind);
    }
    ReadOptionalString(s, "endpoint", scorer.endpoint);
    ReadOptionalString(s, "prob_file", scorer.prob_file);
    Read(s, "seed", scorer.seed);
  }
  if (j.contains("window")) {
    const json& w = j["window"];
    RejectUnknown(w, "window", {"capacity_tokens", "overlap_ratio"});
    Read(w, "capacity_tokens", window.capacity_tokens);
    Read(w, "overlap_ratio", window.overlap_ratio);
  }
  if (j.contains("chunker")) {
    const json& c = j["chunker"];
    RejectUnknown(c, "chunker", {"t1", "max_tokens", "min_tokens"});
    Read(c, "t1", chunker.t1);
    Read(c, "max_tokens", chunker.max_tokens);
    Read(c, "min_tokens", chunker.min_tokens);
  }
  if (j.contains("search")) {
    RejectUnknown(j["search"], "search", {"top_k"});
    Read(j["search"], "top_k", top_k);
  }
  Read(j, "tokenizer", tokenizer);
  Read(j, "separator_prefix", separator_prefix);
  Read(j, "workers", workers);
}

void RunConfig::MergeFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  MergeJson(buffer.str());
}

}  // namespace chunkforge
