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

#ifndef CHUNKFORGE_VFSC_H_
#define CHUNKFORGE_VFSC_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace chunkforge {

using Embedding = std::vector<double>;

// Compressed stand-in for the sub-segment embeddings of one long chunk.
//
// Holds the sum of the unit-normalized sub-vectors (direction_sum), the
// correction factor k = |direction_sum| / n and the sub-vector count n. For
// any query q, Score(q) = k * cos(direction_sum, q) equals the mean cosine
// similarity between q and the original sub-vectors.
class FusedVector {
 public:
  // Throws ValidationError for an empty list, mismatched dimensions,
  // non-finite entries or a zero-norm vector.
  static FusedVector Fuse(std::span<const Embedding> vectors);

  // Rebuilds a stored vector. Throws ValidationError if k is inconsistent
  // with |direction_sum| / n.
  static FusedVector FromParts(std::vector<double> direction_sum, double k,
                               std::uint64_t n);

  // Folds one more sub-vector in without access to the earlier ones.
  void Extend(std::span<const double> vector);

  // k * cos(direction_sum, query); 0 when the unit vectors cancel exactly.
  // Throws ValidationError for a dimension mismatch or zero-norm query.
  double Score(std::span<const double> query) const;

  const std::vector<double>& direction_sum() const { return direction_sum_; }
  double k() const { return k_; }
  std::uint64_t n() const { return n_; }
  std::size_t dimension() const { return direction_sum_.size(); }

  // Stored scalars: the d components plus k and n.
  std::size_t ScalarCount() const { return direction_sum_.size() + 2; }

 private:
  FusedVector() = default;
  void Accumulate(std::span<const double> vector);

  std::vector<double> direction_sum_;
  double k_ = 0.0;
  std::uint64_t n_ = 0;
};

// Mean of cos(v_i, query) computed one sub-vector at a time. This is the
// quantity FusedVector::Score reproduces.
double AverageCosineSimilarity(std::span<const Embedding> vectors,
                               std::span<const double> query);

double CosineSimilarity(std::span<const double> a, std::span<const double> b);

struct IndexEntry {
  std::string chunk_id;
  FusedVector fused;
  // Opaque metadata returned alongside search hits.
  std::string payload;
};

struct SearchHit {
  std::string chunk_id;
  double score = 0.0;
  std::string payload;
};

// Flat index over fused vectors. Search evaluates one corrected cosine per
// entry and ranks by descending score, then ascending chunk_id.
//
// Searches may run concurrently with each other; Upsert takes an exclusive
// lock.
class FusedIndex {
 public:
  // dimension 0 adopts the dimension of the first upserted entry.
  explicit FusedIndex(std::size_t dimension = 0) : dimension_(dimension) {}

  FusedIndex(const FusedIndex&) = delete;
  FusedIndex& operator=(const FusedIndex&) = delete;
  FusedIndex(FusedIndex&& other) noexcept;
  FusedIndex& operator=(FusedIndex&& other) noexcept;

  // Inserts or replaces the entry with the same chunk_id.
  void Upsert(IndexEntry entry);

  std::vector<SearchHit> Search(std::span<const double> query,
                                std::size_t top_k) const;

  std::size_t size() const;
  std::size_t dimension() const;

  // Number of corrected-cosine evaluations performed by Search so far.
  std::uint64_t score_evaluations() const {
    return score_evaluations_.load(std::memory_order_relaxed);
  }

  // Little-endian binary layout:
  //   "CFVX" | u32 version | u64 dimension | u64 entry count
  //   per entry: u32 id length | id bytes | dimension x f64 direction_sum |
  //              f64 k | u64 n | u32 payload length | payload bytes
  void Save(const std::string& path) const;
  // Throws ValidationError on a missing, truncated or malformed file.
  static FusedIndex Load(const std::string& path);

  // One JSON object per entry: {"chunk_id", "k", "n", "v_f", "payload"}.
  void ExportJsonLines(std::ostream& out) const;

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  mutable std::shared_mutex mu_;
  std::size_t dimension_;
  std::vector<IndexEntry> entries_;
  std::unordered_map<std::string, std::size_t> positions_;
  mutable std::atomic<std::uint64_t> score_evaluations_{0};
};

}  // namespace chunkforge

#endif  // CHUNKFORGE_VFSC_H_
