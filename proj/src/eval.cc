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

#include <cstdio>

#include "chunkforge/errors.h"
#include "json.hpp"

namespace chunkforge {

double Precision(std::size_t tp, std::size_t fp) {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Recall(std::size_t tp, std::size_t fn) {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double F1(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

std::vector<bool> Binarize(const BoundaryProbs& probs, double t1) {
  std::vector<bool> labels;
  labels.reserve(probs.size());
  for (double p : probs) labels.push_back(p >= t1);
  return labels;
}

EvalReport BoundaryMetrics(const std::vector<bool>& pred,
                           const std::vector<bool>& gold) {
  CorpusEvaluator evaluator;
  evaluator.Add(pred, gold);
  return evaluator.Report();
}

void CorpusEvaluator::Add(const std::vector<bool>& pred,
                          const std::vector<bool>& gold) {
  if (pred.size() != gold.size()) {
    throw ValidationError("predicted and gold label lists differ in length (" +
                          std::to_string(pred.size()) + " vs " +
                          std::to_string(gold.size()) + ")");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  bool gold_has_boundary = false;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    gold_has_boundary = gold_has_boundary || gold[i];
    if (pred[i] && gold[i]) {
      ++tp;
    } else if (pred[i]) {
      ++fp;
    } else if (gold[i]) {
      ++fn;
    }
  }
  tp_ += tp;
  fp_ += fp;
  fn_ += fn;
  ++docs_;
  if (gold_has_boundary) {
    macro_f1_sum_ += F1(Precision(tp, fp), Recall(tp, fn));
    ++macro_docs_;
  }
}

EvalReport CorpusEvaluator::Report() const {
  EvalReport report;
  report.tp = tp_;
  report.fp = fp_;
  report.fn = fn_;
  report.precision = Precision(tp_, fp_);
  report.recall = Recall(tp_, fn_);
  report.f1 = F1(report.precision, report.recall);
  report.doc_count = docs_;
  report.macro_doc_count = macro_docs_;
  report.macro_f1 =
      macro_docs_ == 0 ? 0.0 : macro_f1_sum_ / static_cast<double>(macro_docs_);
  return report;
}

std::string EvalReport::ToJson() const {
  nlohmann::ordered_json j;
  j["tp"] = tp;
  j["fp"] = fp;
  j["fn"] = fn;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["doc_count"] = doc_count;
  j["macro_f1"] = macro_f1;
  j["macro_doc_count"] = macro_doc_count;
  return j.dump();
}

std::string EvalReport::ToTable() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-10s %10s %10s %10s %8s %8s %8s %6s\n"
                "%-10s %10.4f %10.4f %10.4f %8zu %8zu %8zu %6zu\n"
                "%-10s %10s %10s %10.4f %8s %8s %8s %6zu\n",
                "metric", "precision", "recall", "f1", "tp", "fp", "fn", "docs",
                "micro", precision, recall, f1, tp, fp, fn, doc_count,
                "macro", "-", "-", macro_f1, "-", "-", "-", macro_doc_count);
  return buf;
}

}  // namespace chunkforge
