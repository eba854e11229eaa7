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

#include "chunkforge/scorer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>
#include <utility>

#include "chunkforge/errors.h"
#include "chunkforge/logging.h"
#include "httplib.h"
#include "json.hpp"

namespace chunkforge {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t FnvMix(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t FnvMixWord(std::uint64_t h, std::uint64_t word) {
  for (int i = 0; i < 8; ++i) {
    h ^= (word >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

BoundaryProbs BoundaryScorer::Score(const ScoreRequest& request) const {
  if (request.blocks.empty()) {
    throw ValidationError("cannot score an empty block sequence");
  }
  if (request.blocks.size() == 1) return {};

  const std::size_t tokens = std::accumulate(
      request.blocks.begin(), request.blocks.end(), std::size_t{0},
      [](std::size_t sum, const Block& b) { return sum + b.token_count; });
  if (tokens > CapacityTokens()) {
    throw ScorerError(ScorerError::Kind::kCapacity,
                      "request of " + std::to_string(tokens) +
                          " tokens exceeds scorer capacity of " +
                          std::to_string(CapacityTokens()));
  }

  BoundaryProbs probs = DoScore(request);
  if (probs.size() != request.blocks.size() - 1) {
    throw ScorerError(ScorerError::Kind::kProtocol,
                      Id() + " returned " + std::to_string(probs.size()) +
                          " probabilities for " +
                          std::to_string(request.blocks.size()) + " blocks");
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ScorerError(ScorerError::Kind::kProtocol,
                        Id() + " returned a probability outside [0, 1]");
    }
  }
  return probs;
}

// --- MockScorer ---

double MockScorer::PairScore(std::uint64_t seed, std::string_view left,
                             std::string_view right) {
  std::uint64_t h = FnvMixWord(kFnvOffset, seed);
  h = FnvMixWord(h, left.size());
  h = FnvMix(h, left);
  h = FnvMixWord(h, right.size());
  h = FnvMix(h, right);
  h = SplitMix64(h ^ seed);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::string MockScorer::Id() const {
  return "mock:" + std::to_string(seed_);
}

BoundaryProbs MockScorer::DoScore(const ScoreRequest& request) const {
  BoundaryProbs probs;
  probs.reserve(request.blocks.size() - 1);
  for (std::size_t i = 0; i + 1 < request.blocks.size(); ++i) {
    probs.push_back(
        PairScore(seed_, request.blocks[i].text, request.blocks[i + 1].text));
  }
  return probs;
}

// --- FileScorer ---

FileScorer::FileScorer(std::map<std::string, BoundaryProbs> probs,
                       std::size_t capacity_tokens)
    : probs_(std::move(probs)), capacity_tokens_(capacity_tokens) {
  for (const auto& [id, values] : probs_) {
    for (double p : values) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("stored probability for '" + id +
                              "' is outside [0, 1]");
      }
    }
  }
}

FileScorer FileScorer::FromFile(const std::string& path,
                                std::size_t capacity_tokens) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open probability file: " + path);

  std::map<std::string, BoundaryProbs> probs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("probs") || !j["probs"].is_array()) {
      throw ValidationError(where + ": expected {\"id\", \"probs\"}");
    }
    BoundaryProbs values;
    for (const auto& v : j["probs"]) {
      if (!v.is_number()) throw ValidationError(where + ": non-numeric prob");
      values.push_back(v.get<double>());
    }
    if (!probs.emplace(j["id"].get<std::string>(), std::move(values)).second) {
      throw ValidationError(where + ": duplicate id");
    }
  }
  return FileScorer(std::move(probs), capacity_tokens);
}

BoundaryProbs FileScorer::DoScore(const ScoreRequest& request) const {
  const auto it = probs_.find(std::string(request.doc_id));
  if (it == probs_.end()) {
    throw ValidationError("no stored probabilities for document '" +
                          std::string(request.doc_id) + "'");
  }
  const BoundaryProbs& stored = it->second;
  const std::size_t gaps = request.blocks.size() - 1;
  if (request.first_block + gaps > stored.size()) {
    throw ValidationError(
        "stored probabilities for '" + it->first + "' cover " +
        std::to_string(stored.size()) + " gaps; request needs gaps up to " +
        std::to_string(request.first_block + gaps));
  }
  const auto first = stored.begin() + static_cast<std::ptrdiff_t>(request.first_block);
  return BoundaryProbs(first, first + static_cast<std::ptrdiff_t>(gaps));
}

// --- RemoteScorer ---

RemoteScorer::RemoteScorer(std::string endpoint, std::size_t capacity_tokens,
                           RemoteScorerOptions options)
    : endpoint_(std::move(endpoint)),
      capacity_tokens_(capacity_tokens),
      options_(options) {
  const std::size_t scheme = endpoint_.find("://");
  if (scheme == std::string::npos || endpoint_.substr(0, scheme) != "http") {
    throw ValidationError("scorer endpoint must be an http:// URL: " +
                          endpoint_);
  }
  const std::size_t path_start = endpoint_.find('/', scheme + 3);
  host_ = endpoint_.substr(0, path_start);
  std::string base =
      path_start == std::string::npos ? "" : endpoint_.substr(path_start);
  while (!base.empty() && base.back() == '/') base.pop_back();
  path_ = base + "/score";
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

BoundaryProbs RemoteScorer::ScoreOnce(const std::string& body,
                                      std::size_t expected) const {
  httplib::Client client(host_);
  const auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      options_.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  auto result = client.Post(path_, body, "application/json");
  if (!result) {
    throw ScorerError(ScorerError::Kind::kTransport,
                      "POST " + endpoint_ + path_ + " failed: " +
                          httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 413) {
    throw ScorerError(ScorerError::Kind::kCapacity,
                      "scorer rejected request as over capacity (413)");
  }
  if (status >= 500) {
    throw ScorerError(ScorerError::Kind::kTransport,
                      "scorer failed with status " + std::to_string(status));
  }
  if (status != 200) {
    throw ScorerError(ScorerError::Kind::kProtocol,
                      "scorer rejected request with status " +
                          std::to_string(status));
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::exception& e) {
    throw ScorerError(ScorerError::Kind::kProtocol,
                      std::string("malformed scorer response: ") + e.what());
  }
  if (!j.is_object() || !j.contains("probs") || !j["probs"].is_array()) {
    throw ScorerError(ScorerError::Kind::kProtocol,
                      "scorer response lacks a 'probs' array");
  }
  const auto& values = j["probs"];
  if (values.size() != expected) {
    throw ScorerError(ScorerError::Kind::kProtocol,
                      "scorer returned " + std::to_string(values.size()) +
                          " probabilities, expected " +
                          std::to_string(expected));
  }
  BoundaryProbs probs;
  probs.reserve(expected);
  bool clamped = false;
  for (const auto& v : values) {
    if (!v.is_number()) {
      throw ScorerError(ScorerError::Kind::kProtocol,
                        "scorer returned a non-numeric probability");
    }
    double p = v.get<double>();
    if (std::isnan(p)) {
      throw ScorerError(ScorerError::Kind::kProtocol,
                        "scorer returned NaN");
    }
    if (p < 0.0 || p > 1.0) {
      p = std::clamp(p, 0.0, 1.0);
      clamped = true;
    }
    probs.push_back(p);
  }
  if (clamped) LogWarning("clamped out-of-range probabilities from " + endpoint_);
  return probs;
}

BoundaryProbs RemoteScorer::DoScore(const ScoreRequest& request) const {
  nlohmann::json body;
  auto& blocks = body["blocks"] = nlohmann::json::array();
  for (const Block& b : request.blocks) blocks.push_back(b.text);
  const std::string payload = body.dump();

  for (int attempt = 1;; ++attempt) {
    try {
      return ScoreOnce(payload, request.blocks.size() - 1);
    } catch (const ScorerError& e) {
      if (!e.retryable() || attempt >= options_.max_attempts) throw;
      std::this_thread::sleep_for(options_.backoff * attempt);
    }
  }
}

// --- configuration ---

std::string_view KindName(ScorerConfig::Kind kind) {
  switch (kind) {
    case ScorerConfig::Kind::kMock:
      return "mock";
    case ScorerConfig::Kind::kFile:
      return "file";
    case ScorerConfig::Kind::kRemote:
      return "remote";
  }
  return "unknown";
}

ScorerConfig::Kind ParseScorerKind(std::string_view name) {
  if (name == "mock") return ScorerConfig::Kind::kMock;
  if (name == "file") return ScorerConfig::Kind::kFile;
  if (name == "remote") return ScorerConfig::Kind::kRemote;
  throw ValidationError("unknown scorer kind: " + std::string(name));
}

void ScorerConfig::Validate() const {
  if (capacity_tokens < 1) {
    throw ValidationError("scorer capacity must be at least 1 token");
  }
  if (kind == Kind::kRemote && (!endpoint || endpoint->empty())) {
    throw ValidationError("remote scorer requires an endpoint");
  }
  if (kind == Kind::kFile && (!prob_file || prob_file->empty())) {
    throw ValidationError("file scorer requires a probability file");
  }
}

std::unique_ptr<BoundaryScorer> MakeScorer(const ScorerConfig& config) {
  config.Validate();
  switch (config.kind) {
    case ScorerConfig::Kind::kMock:
      return std::make_unique<MockScorer>(config.seed, config.capacity_tokens);
    case ScorerConfig::Kind::kFile:
      return std::make_unique<FileScorer>(
          FileScorer::FromFile(*config.prob_file, config.capacity_tokens));
    case ScorerConfig::Kind::kRemote:
      return std::make_unique<RemoteScorer>(*config.endpoint,
                                            config.capacity_tokens);
  }
  throw ValidationError("unknown scorer kind");
}

}  // namespace chunkforge
