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

#include "chunkforge/vfsc.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "chunkforge/errors.h"

namespace chunkforge {
namespace {

Embedding RandomVector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Embedding v(d);
  for (double& x : v) x = dist(rng);
  return v;
}

std::vector<Embedding> RandomVectors(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(RandomVector(rng, d));
  return out;
}

TEST(FuseTest, SingleVectorIsNormalized) {
  const FusedVector f = FusedVector::Fuse(std::vector<Embedding>{{3.0, 4.0}});
  EXPECT_DOUBLE_EQ(f.direction_sum()[0], 0.6);
  EXPECT_DOUBLE_EQ(f.direction_sum()[1], 0.8);
  EXPECT_DOUBLE_EQ(f.k(), 1.0);
  EXPECT_EQ(f.n(), 1u);
}

TEST(FuseTest, OrthogonalPair) {
  const FusedVector f = FusedVector::Fuse(std::vector<Embedding>{{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(f.direction_sum(), (std::vector<double>{1.0, 1.0}));
  EXPECT_NEAR(f.k(), std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_NEAR(f.k(), 0.7071, 1e-4);
}

TEST(FuseTest, AntipodalPairCancels) {
  const FusedVector f = FusedVector::Fuse(std::vector<Embedding>{{1.0, 0.0}, {-1.0, 0.0}});
  EXPECT_EQ(f.direction_sum(), (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(f.k(), 0.0);
  EXPECT_EQ(f.Score(std::vector<double>{0.3, -2.0}), 0.0);
}

TEST(FuseTest, RejectsInvalidInput) {
  EXPECT_THROW(FusedVector::Fuse(std::vector<Embedding>{}), ValidationError);
  EXPECT_THROW(FusedVector::Fuse(std::vector<Embedding>{{}}), ValidationError);
  EXPECT_THROW(FusedVector::Fuse(std::vector<Embedding>{{1.0, 0.0}, {0.0, 0.0}}), ValidationError);
  EXPECT_THROW(FusedVector::Fuse(std::vector<Embedding>{{1.0, 0.0}, {1.0}}), ValidationError);
  EXPECT_THROW(FusedVector::Fuse(std::vector<Embedding>{{NAN, 1.0}}), ValidationError);
  EXPECT_THROW(FusedVector::Fuse(std::vector<Embedding>{{INFINITY, 1.0}}), ValidationError);
}

TEST(ScoreTest, OrthogonalPairAgainstAxis) {
  const std::vector<Embedding> vectors = {{1.0, 0.0}, {0.0, 1.0}};
  const std::vector<double> query = {1.0, 0.0};
  EXPECT_NEAR(FusedVector::Fuse(vectors).Score(query), 0.5, 1e-15);
  EXPECT_NEAR(AverageCosineSimilarity(vectors, query), 0.5, 1e-15);
}

TEST(ScoreTest, CopiesOfQueryScoreOne) {
  const Embedding v = {0.3, -1.2, 2.5};
  const FusedVector f = FusedVector::Fuse(std::vector<Embedding>(7, v));
  EXPECT_NEAR(f.Score(v), 1.0, 1e-15);
  EXPECT_NEAR(f.k(), 1.0, 1e-15);
}

TEST(ScoreTest, RejectsBadQueries) {
  const FusedVector f = FusedVector::Fuse(std::vector<Embedding>{{1.0, 0.0}});
  EXPECT_THROW(f.Score(std::vector<double>{0.0, 0.0}), ValidationError);
  EXPECT_THROW(f.Score(std::vector<double>{1.0}), ValidationError);
}

TEST(OracleTest, SingleVectorIsPlainCosine) {
  const std::vector<Embedding> vectors = {{1.0, 2.0, 2.0}};
  const std::vector<double> query = {2.0, 0.0, 0.0};
  EXPECT_NEAR(AverageCosineSimilarity(vectors, query), 1.0 / 3.0, 1e-15);
}

TEST(VfscPropertyTest, MatchesMeanCosineSimilarity) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng() % 128;
    const auto vectors = RandomVectors(rng, 64, d);
    const Embedding query = RandomVector(rng, d);
    EXPECT_NEAR(FusedVector::Fuse(vectors).Score(query),
                AverageCosineSimilarity(vectors, query), 1e-9);
  }
}

TEST(VfscPropertyTest, ScaleAndPermutationInvariant) {
  std::mt19937_64 rng(65);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + rng() % 32;
    auto vectors = RandomVectors(rng, 1 + rng() % 20, d);
    const FusedVector base = FusedVector::Fuse(vectors);
    for (auto& v : vectors) {
      const double s = scale(rng);
      for (double& x : v) x *= s;
    }
    std::shuffle(vectors.begin(), vectors.end(), rng);
    const FusedVector other = FusedVector::Fuse(vectors);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_NEAR(base.direction_sum()[i], other.direction_sum()[i], 1e-12);
    }
    EXPECT_NEAR(base.k(), other.k(), 1e-12);
  }
}

TEST(VfscPropertyTest, ScoreBoundedByCorrection) {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng() % 16;
    const FusedVector f = FusedVector::Fuse(RandomVectors(rng, 1 + rng() % 10, d));
    EXPECT_GE(f.k(), 0.0);
    EXPECT_LE(f.k(), 1.0 + 1e-15);
    EXPECT_LE(std::abs(f.Score(RandomVector(rng, d))), f.k() + 1e-15);
    EXPECT_EQ(f.ScalarCount(), d + 2);
  }
}

TEST(VfscPropertyTest, ExtendMatchesBatchFusion) {
  std::mt19937_64 rng(67);
  const auto vectors = RandomVectors(rng, 30, 16);
  FusedVector incremental = FusedVector::Fuse(std::span(vectors).first(1));
  for (std::size_t i = 1; i < vectors.size(); ++i) incremental.Extend(vectors[i]);
  const FusedVector batch = FusedVector::Fuse(vectors);
  EXPECT_EQ(incremental.n(), 30u);
  EXPECT_EQ(incremental.direction_sum(), batch.direction_sum());
  EXPECT_EQ(incremental.k(), batch.k());
  EXPECT_THROW(incremental.Extend(std::vector<double>(16, 0.0)), ValidationError);
}

TEST(FromPartsTest, ChecksCorrectionFactor) {
  EXPECT_NO_THROW(FusedVector::FromParts({1.0, 1.0}, std::sqrt(2.0) / 2.0, 2));
  EXPECT_THROW(FusedVector::FromParts({1.0, 1.0}, 0.5, 2), ValidationError);
  EXPECT_THROW(FusedVector::FromParts({1.0, 1.0}, 1.0, 0), ValidationError);
  EXPECT_THROW(FusedVector::FromParts({}, 0.0, 1), ValidationError);
}

IndexEntry Entry(std::string id, const std::vector<Embedding>& vectors, std::string payload = {}) {
  return IndexEntry{std::move(id), FusedVector::Fuse(vectors), std::move(payload)};
}

TEST(FusedIndexTest, EmptyIndexReturnsNothing) {
  const FusedIndex index;
  EXPECT_TRUE(index.Search(std::vector<double>{1.0, 0.0}, 10).empty());
  EXPECT_EQ(index.score_evaluations(), 0u);
}

TEST(FusedIndexTest, RanksByCorrectedScore) {
  FusedIndex index;
  index.Upsert(Entry("first", {{1.0, 0.0}, {0.0, 1.0}}));  // 0.5 against (1, 0)
  index.Upsert(Entry("second", {{2.0, 0.0}}));             // 1.0
  const auto hits = index.Search(std::vector<double>{1.0, 0.0}, 10);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].chunk_id, "second");
  EXPECT_NEAR(hits[0].score, 1.0, 1e-15);
  EXPECT_EQ(hits[1].chunk_id, "first");
  EXPECT_NEAR(hits[1].score, 0.5, 1e-15);
}

TEST(FusedIndexTest, TiesBreakByChunkIdAndTopKTruncates) {
  FusedIndex index;
  for (const char* id : {"c", "a", "d", "b"}) index.Upsert(Entry(id, {{1.0, 1.0}}));
  const auto hits = index.Search(std::vector<double>{1.0, 0.0}, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].chunk_id, "a");
  EXPECT_EQ(hits[1].chunk_id, "b");
  EXPECT_EQ(hits[2].chunk_id, "c");
  EXPECT_TRUE(index.Search(std::vector<double>{1.0, 0.0}, 0).empty());
}

TEST(FusedIndexTest, UpsertReplacesAndChecksDimension) {
  FusedIndex index;
  index.Upsert(Entry("x", {{1.0, 0.0}}, "old"));
  index.Upsert(Entry("x", {{0.0, 1.0}}, "new"));
  EXPECT_EQ(index.size(), 1u);
  const auto hits = index.Search(std::vector<double>{0.0, 1.0}, 1);
  EXPECT_EQ(hits[0].payload, "new");
  EXPECT_NEAR(hits[0].score, 1.0, 1e-15);
  EXPECT_THROW(index.Upsert(Entry("y", {{1.0, 0.0, 0.0}})), ValidationError);
  EXPECT_THROW(index.Search(std::vector<double>{1.0, 0.0, 0.0}, 1), ValidationError);
}

TEST(FusedIndexTest, RankingMatchesExhaustiveOracle) {
  std::mt19937_64 rng(100);
  const std::size_t d = 48;
  FusedIndex index;
  std::vector<std::pair<std::string, std::vector<Embedding>>> raw;
  for (int i = 0; i < 100; ++i) {
    auto vectors = RandomVectors(rng, 1 + rng() % 12, d);
    std::string id = "chunk-" + std::to_string(i);
    index.Upsert(Entry(id, vectors));
    raw.emplace_back(std::move(id), std::move(vectors));
  }
  for (int q = 0; q < 20; ++q) {
    const Embedding query = RandomVector(rng, d);
    std::vector<std::pair<double, std::string>> oracle;
    for (const auto& [id, vectors] : raw) {
      oracle.emplace_back(-AverageCosineSimilarity(vectors, query), id);
    }
    std::sort(oracle.begin(), oracle.end());
    const auto hits = index.Search(query, 10);
    ASSERT_EQ(hits.size(), 10u);
    for (std::size_t r = 0; r < 10; ++r) {
      EXPECT_EQ(hits[r].chunk_id, oracle[r].second);
      EXPECT_NEAR(hits[r].score, -oracle[r].first, 1e-9);
    }
  }
  EXPECT_EQ(index.score_evaluations(), 20u * 100u);
}

class IndexFileTest : public ::testing::Test {
 protected:
  void TearDown() override { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_ = std::filesystem::temp_directory_path() /
                                ("chunkforge_index_" + std::to_string(::getpid()) + ".bin");
};

TEST_F(IndexFileTest, SaveLoadRoundTrip) {
  std::mt19937_64 rng(4);
  FusedIndex index;
  for (int i = 0; i < 25; ++i) {
    index.Upsert(Entry("id-" + std::to_string(i), RandomVectors(rng, 1 + i % 5, 7),
                       i % 2 ? R"({"doc":"x"})" : ""));
  }
  index.Save(path());
  const FusedIndex loaded = FusedIndex::Load(path());
  EXPECT_EQ(loaded.size(), 25u);
  EXPECT_EQ(loaded.dimension(), 7u);
  const Embedding query = RandomVector(rng, 7);
  const auto a = index.Search(query, 25);
  const auto b = loaded.Search(query, 25);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].chunk_id, b[i].chunk_id);
    EXPECT_EQ(a[i].score, b[i].score);  // bit-exact
    EXPECT_EQ(a[i].payload, b[i].payload);
  }
}

TEST_F(IndexFileTest, LittleEndianLayout) {
  FusedIndex index;
  index.Upsert(IndexEntry{"ab", FusedVector::Fuse(std::vector<Embedding>{{1.0, 0.0}}), "p"});
  index.Save(path());
  std::ifstream in(path(), std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // header 4 + 4 + 8 + 8, record 4 + 2 + 2*8 + 8 + 8 + 4 + 1
  ASSERT_EQ(bytes.size(), 24u + 43u);
  EXPECT_EQ(bytes.substr(0, 4), "CFVX");
  EXPECT_EQ(bytes[4], 1);  // version
  EXPECT_EQ(bytes[8], 2);  // dimension
  EXPECT_EQ(bytes[16], 1);  // entry count
  EXPECT_EQ(bytes[24], 2);  // id length
  EXPECT_EQ(bytes.substr(28, 2), "ab");
  // 1.0 as a little-endian IEEE double: 00 00 00 00 00 00 f0 3f
  EXPECT_EQ(static_cast<unsigned char>(bytes[30 + 6]), 0xf0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[30 + 7]), 0x3f);
  EXPECT_EQ(bytes.back(), 'p');
}

TEST_F(IndexFileTest, RejectsCorruptFiles) {
  EXPECT_THROW(FusedIndex::Load(path()), ValidationError);  // missing
  FusedIndex index;
  index.Upsert(Entry("x", {{1.0, 2.0}}));
  index.Save(path());
  std::string bytes;
  {
    std::ifstream in(path(), std::ios::binary);
    bytes.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }
  auto write = [&](const std::string& content) {
    std::ofstream out(path(), std::ios::binary | std::ios::trunc);
    out << content;
  };
  write(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(FusedIndex::Load(path()), ValidationError);
  write("XXXX" + bytes.substr(4));
  EXPECT_THROW(FusedIndex::Load(path()), ValidationError);
  write(bytes + "junk");
  EXPECT_THROW(FusedIndex::Load(path()), ValidationError);
}

TEST_F(IndexFileTest, EmptyIndexRoundTrip) {
  FusedIndex().Save(path());
  const FusedIndex loaded = FusedIndex::Load(path());
  EXPECT_EQ(loaded.size(), 0u);
  EXPECT_TRUE(loaded.Search(std::vector<double>{1.0, 2.0, 3.0}, 5).empty());
}

TEST(FusedIndexTest, JsonLinesExport) {
  FusedIndex index;
  index.Upsert(IndexEntry{"c1", FusedVector::Fuse(std::vector<Embedding>{{1.0, 0.0}, {0.0, 1.0}}), "meta"});
  std::ostringstream out;
  index.ExportJsonLines(out);
  EXPECT_EQ(out.str(), R"({"chunk_id":"c1","k":0.7071067811865476,"n":2,"v_f":[1.0,1.0],"payload":"meta"})"
                       "\n");
}

TEST(FusedIndexTest, ConcurrentSearches) {
  std::mt19937_64 rng(9);
  FusedIndex index;
  for (int i = 0; i < 200; ++i) index.Upsert(Entry("e" + std::to_string(i), RandomVectors(rng, 3, 8)));
  const Embedding query = RandomVector(rng, 8);
  const auto expected = index.Search(query, 5);
  std::vector<std::thread> threads;
  std::atomic<int> matches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int r = 0; r < 50; ++r) {
        const auto hits = index.Search(query, 5);
        if (hits.size() == expected.size() && hits[0].chunk_id == expected[0].chunk_id) ++matches;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(matches.load(), 400);
  EXPECT_EQ(index.score_evaluations(), 200u * 401u);
}

}  // namespace
}  // namespace chunkforge
