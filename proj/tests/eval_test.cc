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

#include "chunkforge/eval.h"

#include <gtest/gtest.h>

#include <random>

#include "chunkforge/errors.h"
#include "json.hpp"

namespace chunkforge {
namespace {

std::vector<bool> FromMask(unsigned mask, std::size_t n) {
  std::vector<bool> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1u;
  return labels;
}

TEST(BinarizeTest, ThresholdIsInclusive) {
  EXPECT_EQ(Binarize({0.2, 0.5, 0.9, 0.49999}, 0.5),
            (std::vector<bool>{false, true, true, false}));
  EXPECT_TRUE(Binarize({}, 0.5).empty());
}

TEST(RatioTest, ZeroDenominatorsAreZero) {
  EXPECT_EQ(Precision(0, 0), 0.0);
  EXPECT_EQ(Recall(0, 0), 0.0);
  EXPECT_EQ(F1(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(F1(1.0, 0.5), 2.0 / 3.0);
}

TEST(BoundaryMetricsTest, HandExample) {
  const EvalReport r = BoundaryMetrics({true, false, true}, {true, true, false});
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 0.5);
}

TEST(BoundaryMetricsTest, PerfectAndEmpty) {
  const EvalReport perfect = BoundaryMetrics({false, true, true}, {false, true, true});
  EXPECT_EQ(perfect.f1, 1.0);
  const EvalReport none = BoundaryMetrics({false, false}, {false, false});
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.f1, 0.0);
  EXPECT_EQ(none.macro_doc_count, 0u);
}

TEST(BoundaryMetricsTest, LengthMismatchThrows) {
  EXPECT_THROW(BoundaryMetrics({true}, {true, false}), ValidationError);
}

// Every pair of length-6 label vectors, against counts derived bit by bit.
TEST(BoundaryMetricsTest, ExhaustiveSmallVectors) {
  constexpr std::size_t kN = 6;
  for (unsigned p = 0; p < (1u << kN); ++p) {
    for (unsigned g = 0; g < (1u << kN); ++g) {
      const std::size_t tp = __builtin_popcount(p & g);
      const std::size_t fp = __builtin_popcount(p & ~g & 0x3fu);
      const std::size_t fn = __builtin_popcount(~p & g & 0x3fu);
      const double precision = tp + fp ? double(tp) / double(tp + fp) : 0.0;
      const double recall = tp + fn ? double(tp) / double(tp + fn) : 0.0;
      const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
      const EvalReport r = BoundaryMetrics(FromMask(p, kN), FromMask(g, kN));
      ASSERT_EQ(r.tp, tp);
      ASSERT_EQ(r.fp, fp);
      ASSERT_EQ(r.fn, fn);
      ASSERT_NEAR(r.precision, precision, 1e-12);
      ASSERT_NEAR(r.recall, recall, 1e-12);
      ASSERT_NEAR(r.f1, f1, 1e-12);
      // Swapping roles swaps precision and recall.
      const EvalReport swapped = BoundaryMetrics(FromMask(g, kN), FromMask(p, kN));
      ASSERT_NEAR(swapped.precision, r.recall, 1e-12);
      ASSERT_NEAR(swapped.recall, r.precision, 1e-12);
      ASSERT_NEAR(swapped.f1, r.f1, 1e-12);
    }
  }
}

TEST(CorpusEvaluatorTest, PoolsCountsAndAveragesMacro) {
  std::mt19937_64 rng(12);
  CorpusEvaluator corpus;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (int doc = 0; doc < 40; ++doc) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<bool> pred(n), gold(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng() % 3 == 0;
      gold[i] = rng() % 4 == 0;
    }
    const EvalReport one = BoundaryMetrics(pred, gold);
    tp += one.tp;
    fp += one.fp;
    fn += one.fn;
    corpus.Add(pred, gold);
  }
  const EvalReport r = corpus.Report();
  EXPECT_EQ(r.tp, tp);
  EXPECT_EQ(r.fp, fp);
  EXPECT_EQ(r.fn, fn);
  EXPECT_EQ(r.doc_count, 40u);
  EXPECT_DOUBLE_EQ(r.precision, Precision(tp, fp));
  EXPECT_DOUBLE_EQ(r.recall, Recall(tp, fn));
}

TEST(CorpusEvaluatorTest, MacroSkipsDocumentsWithoutGoldBoundaries) {
  CorpusEvaluator corpus;
  corpus.Add({true, true}, {true, true});     // F1 1.0
  corpus.Add({true, false}, {false, true});   // F1 0.0
  corpus.Add({true, false}, {false, false});  // no gold boundary, skipped
  const EvalReport r = corpus.Report();
  EXPECT_EQ(r.doc_count, 3u);
  EXPECT_EQ(r.macro_doc_count, 2u);
  EXPECT_DOUBLE_EQ(r.macro_f1, 0.5);
  // Micro: tp 2, fp 2, fn 1.
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 2.0 / 3.0);
}

TEST(EvalReportTest, JsonAndTable) {
  const EvalReport r = BoundaryMetrics({true, false, true}, {true, true, false});
  const auto j = nlohmann::json::parse(r.ToJson());
  EXPECT_EQ(j.at("tp"), 1);
  EXPECT_EQ(j.at("f1"), 0.5);
  EXPECT_EQ(j.at("macro_f1"), 0.5);
  const std::string table = r.ToTable();
  EXPECT_NE(table.find("micro"), std::string::npos);
  EXPECT_NE(table.find("0.5000"), std::string::npos);
}

}  // namespace
}  // namespace chunkforge
