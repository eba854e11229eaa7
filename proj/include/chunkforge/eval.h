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

#ifndef CHUNKFORGE_EVAL_H_
#define CHUNKFORGE_EVAL_H_

#include <cstddef>
#include <string>
#include <vector>

#include "chunkforge/scorer.h"

namespace chunkforge {

// Boundary-level scores. precision, recall and f1 come from the pooled
// tp/fp/fn counts (micro average); macro_f1 averages per-document F1 over
// documents whose gold labels contain at least one boundary.
struct EvalReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t doc_count = 0;
  double macro_f1 = 0.0;
  std::size_t macro_doc_count = 0;

  std::string ToJson() const;
  std::string ToTable() const;
};

// Ratios with 0/0 defined as 0.
double Precision(std::size_t tp, std::size_t fp);
double Recall(std::size_t tp, std::size_t fn);
double F1(double precision, double recall);

// labels[i] = probs[i] >= t1.
std::vector<bool> Binarize(const BoundaryProbs& probs, double t1);

// Scores one document. Throws ValidationError if the label lists differ in
// length.
EvalReport BoundaryMetrics(const std::vector<bool>& pred,
                           const std::vector<bool>& gold);

// Pools counts over many documents.
class CorpusEvaluator {
 public:
  void Add(const std::vector<bool>& pred, const std::vector<bool>& gold);
  EvalReport Report() const;

 private:
  std::size_t tp_ = 0;
  std::size_t fp_ = 0;
  std::size_t fn_ = 0;
  std::size_t docs_ = 0;
  double macro_f1_sum_ = 0.0;
  std::size_t macro_docs_ = 0;
};

}  // namespace chunkforge

#endif  // CHUNKFORGE_EVAL_H_
