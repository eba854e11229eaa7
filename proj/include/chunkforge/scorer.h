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

#ifndef CHUNKFORGE_SCORER_H_
#define CHUNKFORGE_SCORER_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chunkforge/blocker.h"

namespace chunkforge {

// probs[i] is the probability of a topic boundary between blocks i and i+1.
using BoundaryProbs = std::vector<double>;

// A contiguous run of a document's blocks submitted for scoring.
struct ScoreRequest {
  std::string_view doc_id;
  // Position of blocks.front() within the whole document.
  std::size_t first_block = 0;
  std::span<const Block> blocks;
};

// Produces boundary probabilities for the gaps of a block sequence.
//
// Score() enforces the contract around the implementation hook: the request
// must be non-empty and fit in CapacityTokens(), and the result must hold
// exactly blocks.size() - 1 values in [0, 1]. A single block never reaches
// the implementation. Implementations must tolerate concurrent calls.
class BoundaryScorer {
 public:
  virtual ~BoundaryScorer() = default;

  BoundaryProbs Score(const ScoreRequest& request) const;
  BoundaryProbs Score(std::span<const Block> blocks) const {
    return Score(ScoreRequest{{}, 0, blocks});
  }

  virtual std::size_t CapacityTokens() const {
    return std::numeric_limits<std::size_t>::max();
  }
  virtual std::string Id() const = 0;

 protected:
  virtual BoundaryProbs DoScore(const ScoreRequest& request) const = 0;
};

// Test double: the score of gap i is a hash of (seed, text of block i, text
// of block i+1) mapped into [0, 1). It depends on nothing else, so windowed
// and whole-document scoring agree exactly.
class MockScorer final : public BoundaryScorer {
 public:
  explicit MockScorer(std::uint64_t seed,
                      std::size_t capacity_tokens =
                          std::numeric_limits<std::size_t>::max())
      : seed_(seed), capacity_tokens_(capacity_tokens) {}

  static double PairScore(std::uint64_t seed, std::string_view left,
                          std::string_view right);

  std::size_t CapacityTokens() const override { return capacity_tokens_; }
  std::string Id() const override;

 protected:
  BoundaryProbs DoScore(const ScoreRequest& request) const override;

 private:
  std::uint64_t seed_;
  std::size_t capacity_tokens_;
};

// Replays stored document-level probabilities. The probability file holds
// one JSON object per line: {"id": "...", "probs": [...]}. A request for
// blocks [first, first + n) of document `id` returns the stored slice.
class FileScorer final : public BoundaryScorer {
 public:
  // Throws ValidationError if the file is missing or malformed.
  static FileScorer FromFile(const std::string& path,
                             std::size_t capacity_tokens =
                                 std::numeric_limits<std::size_t>::max());

  explicit FileScorer(std::map<std::string, BoundaryProbs> probs,
                      std::size_t capacity_tokens =
                          std::numeric_limits<std::size_t>::max());

  std::size_t CapacityTokens() const override { return capacity_tokens_; }
  std::string Id() const override { return "file"; }

 protected:
  BoundaryProbs DoScore(const ScoreRequest& request) const override;

 private:
  std::map<std::string, BoundaryProbs> probs_;
  std::size_t capacity_tokens_;
};

struct RemoteScorerOptions {
  std::chrono::milliseconds timeout{30000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{100};
};

// Client for the HTTP scoring service:
//   POST <endpoint>/score  {"blocks": [...]}  ->  {"probs": [...]}
// Transport failures and 5xx responses are retried up to max_attempts and
// then surface as retryable ScorerErrors. Values slightly outside [0, 1] are
// clamped with a warning; NaN or a wrong-length response is a protocol error.
class RemoteScorer final : public BoundaryScorer {
 public:
  RemoteScorer(std::string endpoint, std::size_t capacity_tokens,
               RemoteScorerOptions options = {});

  std::size_t CapacityTokens() const override { return capacity_tokens_; }
  std::string Id() const override { return "remote:" + endpoint_; }

 protected:
  BoundaryProbs DoScore(const ScoreRequest& request) const override;

 private:
  BoundaryProbs ScoreOnce(const std::string& body, std::size_t expected) const;

  std::string endpoint_;
  std::string host_;  // scheme://host[:port]
  std::string path_;  // base path + "/score"
  std::size_t capacity_tokens_;
  RemoteScorerOptions options_;
};

struct ScorerConfig {
  enum class Kind { kMock, kFile, kRemote };

  Kind kind = Kind::kMock;
  std::optional<std::string> endpoint;
  std::optional<std::string> prob_file;
  std::uint64_t seed = 0;
  std::size_t capacity_tokens = 13000;

  // Throws ValidationError when the kind's required field is absent.
  void Validate() const;
};

std::string_view KindName(ScorerConfig::Kind kind);
// Throws ValidationError for unknown names.
ScorerConfig::Kind ParseScorerKind(std::string_view name);

std::unique_ptr<BoundaryScorer> MakeScorer(const ScorerConfig& config);

}  // namespace chunkforge

#endif  // CHUNKFORGE_SCORER_H_
