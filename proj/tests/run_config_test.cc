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

#include <gtest/gtest.h>

#include "chunkforge/errors.h"
#include "json.hpp"

namespace chunkforge {
namespace {

TEST(RunConfigTest, Defaults) {
  const RunConfig config;
  EXPECT_EQ(config.scorer.kind, ScorerConfig::Kind::kMock);
  EXPECT_EQ(config.window.capacity_tokens, 13000u);
  EXPECT_DOUBLE_EQ(config.window.overlap_ratio, 0.10);
  EXPECT_DOUBLE_EQ(config.chunker.t1, 0.5);
  EXPECT_EQ(config.chunker.max_tokens, 700u);
  EXPECT_EQ(config.chunker.min_tokens, 85u);
  EXPECT_EQ(config.top_k, 10u);
  EXPECT_NO_THROW(config.Validate());
}

TEST(RunConfigTest, MergeOverridesOnlyGivenKeys) {
  RunConfig config;
  config.MergeJson(R"({"chunker": {"max_tokens": 400}, "window": {"overlap_ratio": 0.2},
                       "scorer": {"kind": "remote", "endpoint": "http://localhost:9/v1"}})");
  EXPECT_EQ(config.chunker.max_tokens, 400u);
  EXPECT_EQ(config.chunker.min_tokens, 85u);
  EXPECT_DOUBLE_EQ(config.window.overlap_ratio, 0.2);
  EXPECT_EQ(config.window.capacity_tokens, 13000u);
  EXPECT_EQ(config.scorer.kind, ScorerConfig::Kind::kRemote);
  EXPECT_EQ(config.scorer.endpoint, "http://localhost:9/v1");
  EXPECT_NO_THROW(config.Validate());
}

TEST(RunConfigTest, ToJsonRoundTrips) {
  RunConfig config;
  config.chunker.t1 = 0.35;
  config.top_k = 3;
  config.scorer.seed = 99;
  RunConfig copy;
  copy.MergeJson(config.ToJson());
  EXPECT_EQ(copy.ToJson(), config.ToJson());
  const auto j = nlohmann::json::parse(config.ToJson());
  EXPECT_EQ(j.at("search").at("top_k"), 3);
  EXPECT_TRUE(j.at("scorer").at("endpoint").is_null());
}

TEST(RunConfigTest, RejectsUnknownKeysAndWrongTypes) {
  RunConfig config;
  EXPECT_THROW(config.MergeJson(R"({"chunkr": {}})"), ValidationError);
  EXPECT_THROW(config.MergeJson(R"({"chunker": {"max": 3}})"), ValidationError);
  EXPECT_THROW(config.MergeJson(R"({"chunker": {"t1": "high"}})"), ValidationError);
  EXPECT_THROW(config.MergeJson(R"({"window": 5})"), ValidationError);
  EXPECT_THROW(config.MergeJson(R"({"scorer": {"kind": "oracle"}})"), ValidationError);
  EXPECT_THROW(config.MergeJson("{not json"), ValidationError);
  EXPECT_THROW(config.MergeFile("/nonexistent/chunkforge.json"), ValidationError);
}

TEST(RunConfigTest, ValidateCatchesBadCombinations) {
  RunConfig config;
  config.chunker.min_tokens = 800;  // above max
  EXPECT_THROW(config.Validate(), ValidationError);

  config = RunConfig();
  config.window.overlap_ratio = 0.5;
  EXPECT_THROW(config.Validate(), ValidationError);

  config = RunConfig();
  config.scorer.kind = ScorerConfig::Kind::kRemote;  // no endpoint
  EXPECT_THROW(config.Validate(), ValidationError);

  config = RunConfig();
  config.scorer.kind = ScorerConfig::Kind::kFile;  // no prob file
  EXPECT_THROW(config.Validate(), ValidationError);

  config = RunConfig();
  config.tokenizer = "bpe";
  EXPECT_THROW(config.Validate(), ValidationError);

  config = RunConfig();
  config.workers = 0;
  EXPECT_THROW(config.Validate(), ValidationError);
}

TEST(RunConfigTest, EffectiveScorerUsesWindowCapacity) {
  RunConfig config;
  config.window.capacity_tokens = 512;
  EXPECT_EQ(config.EffectiveScorer().capacity_tokens, 512u);
}

}  // namespace
}  // namespace chunkforge
