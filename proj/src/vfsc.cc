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

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>
#include <ostream>
#include <utility>

#include "chunkforge/errors.h"
#include "json.hpp"

namespace chunkforge {
namespace {

constexpr char kMagic[4] = {'C', 'F', 'V', 'X'};
// Relative slack allowed between a stored k and |direction_sum| / n.
constexpr double kCorrectionTolerance = 1e-9;

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Norm(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

void CheckVector(std::span<const double> v, std::size_t dimension,
                 const char* what) {
  if (v.size() != dimension) {
    throw ValidationError(std::string(what) + " has dimension " +
                          std::to_string(v.size()) + ", expected " +
                          std::to_string(dimension));
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw ValidationError(std::string(what) + " has a non-finite entry");
    }
  }
}

template <typename T>
void PutLittleEndian(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

void PutDouble(std::string& out, double value) {
  PutLittleEndian(out, std::bit_cast<std::uint64_t>(value));
}

class Reader {
 public:
  Reader(std::string_view data, std::string path)
      : data_(data), path_(std::move(path)) {}

  std::string_view Bytes(std::size_t n) {
    if (data_.size() - pos_ < n) {
      throw ValidationError("index file truncated: " + path_);
    }
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  T Get() {
    const std::string_view raw = Bytes(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(raw[i])) << (8 * i);
    }
    return value;
  }

  double GetDouble() { return std::bit_cast<double>(Get<std::uint64_t>()); }

  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string path_;
};

}  // namespace

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine similarity of vectors with different dimensions");
  }
  const double na = Norm(a);
  const double nb = Norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw ValidationError("cosine similarity of a zero-norm vector");
  }
  return Dot(a, b) / (na * nb);
}

double AverageCosineSimilarity(std::span<const Embedding> vectors,
                               std::span<const double> query) {
  if (vectors.empty()) throw ValidationError("no vectors to average over");
  double sum = 0.0;
  for (const Embedding& v : vectors) sum += CosineSimilarity(v, query);
  return sum / static_cast<double>(vectors.size());
}

// --- FusedVector ---

FusedVector FusedVector::Fuse(std::span<const Embedding> vectors) {
  if (vectors.empty()) throw ValidationError("cannot fuse an empty vector list");
  const std::size_t dimension = vectors.front().size();
  if (dimension == 0) throw ValidationError("embeddings must have dimension >= 1");

  FusedVector fused;
  fused.direction_sum_.assign(dimension, 0.0);
  for (const Embedding& v : vectors) fused.Accumulate(v);
  fused.k_ = Norm(fused.direction_sum_) / static_cast<double>(fused.n_);
  return fused;
}

FusedVector FusedVector::FromParts(std::vector<double> direction_sum, double k,
                                   std::uint64_t n) {
  if (direction_sum.empty()) throw ValidationError("fused vector has dimension 0");
  if (n == 0) throw ValidationError("fused vector must cover at least one sub-vector");
  CheckVector(direction_sum, direction_sum.size(), "fused vector");
  const double expected = Norm(direction_sum) / static_cast<double>(n);
  if (!std::isfinite(k) ||
      std::abs(k - expected) > kCorrectionTolerance * std::max(1.0, expected)) {
    throw ValidationError("correction factor does not match |v_f| / n");
  }
  FusedVector fused;
  fused.direction_sum_ = std::move(direction_sum);
  fused.k_ = k;
  fused.n_ = n;
  return fused;
}

void FusedVector::Accumulate(std::span<const double> vector) {
  CheckVector(vector, direction_sum_.size(), "embedding");
  const double norm = Norm(vector);
  if (norm == 0.0) throw ValidationError("cannot normalize a zero-norm embedding");
  for (std::size_t i = 0; i < vector.size(); ++i) {
    direction_sum_[i] += vector[i] / norm;
  }
  ++n_;
}

void FusedVector::Extend(std::span<const double> vector) {
  Accumulate(vector);
  k_ = Norm(direction_sum_) / static_cast<double>(n_);
}

double FusedVector::Score(std::span<const double> query) const {
  CheckVector(query, direction_sum_.size(), "query");
  const double query_norm = Norm(query);
  if (query_norm == 0.0) throw ValidationError("query has zero norm");
  const double fused_norm = Norm(direction_sum_);
  if (fused_norm == 0.0) return 0.0;
  return k_ * (Dot(direction_sum_, query) / (fused_norm * query_norm));
}

// --- FusedIndex ---

FusedIndex::FusedIndex(FusedIndex&& other) noexcept
    : dimension_(other.dimension_),
      entries_(std::move(other.entries_)),
      positions_(std::move(other.positions_)),
      score_evaluations_(other.score_evaluations_.load()) {}

FusedIndex& FusedIndex::operator=(FusedIndex&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    dimension_ = other.dimension_;
    entries_ = std::move(other.entries_);
    positions_ = std::move(other.positions_);
    score_evaluations_ = other.score_evaluations_.load();
  }
  return *this;
}

void FusedIndex::Upsert(IndexEntry entry) {
  std::unique_lock lock(mu_);
  if (dimension_ == 0) dimension_ = entry.fused.dimension();
  if (entry.fused.dimension() != dimension_) {
    throw ValidationError("entry '" + entry.chunk_id + "' has dimension " +
                          std::to_string(entry.fused.dimension()) +
                          ", index has " + std::to_string(dimension_));
  }
  const auto it = positions_.find(entry.chunk_id);
  if (it != positions_.end()) {
    entries_[it->second] = std::move(entry);
    return;
  }
  positions_.emplace(entry.chunk_id, entries_.size());
  entries_.push_back(std::move(entry));
}

std::vector<SearchHit> FusedIndex::Search(std::span<const double> query,
                                          std::size_t top_k) const {
  std::shared_lock lock(mu_);
  if (entries_.empty()) return {};
  CheckVector(query, dimension_, "query");

  std::vector<SearchHit> hits;
  hits.reserve(entries_.size());
  for (const IndexEntry& entry : entries_) {
    hits.push_back(SearchHit{entry.chunk_id, entry.fused.Score(query), entry.payload});
    score_evaluations_.fetch_add(1, std::memory_order_relaxed);
  }
  const auto ranked_before = [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk_id < b.chunk_id;
  };
  const std::size_t keep = std::min(top_k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep),
                    hits.end(), ranked_before);
  hits.resize(keep);
  return hits;
}

std::size_t FusedIndex::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::size_t FusedIndex::dimension() const {
  std::shared_lock lock(mu_);
  return dimension_;
}

void FusedIndex::Save(const std::string& path) const {
  std::string out(kMagic, sizeof(kMagic));
  {
    std::shared_lock lock(mu_);
    PutLittleEndian<std::uint32_t>(out, kFormatVersion);
    PutLittleEndian<std::uint64_t>(out, dimension_);
    PutLittleEndian<std::uint64_t>(out, entries_.size());
    for (const IndexEntry& entry : entries_) {
      PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(entry.chunk_id.size()));
      out += entry.chunk_id;
      for (double x : entry.fused.direction_sum()) PutDouble(out, x);
      PutDouble(out, entry.fused.k());
      PutLittleEndian<std::uint64_t>(out, entry.fused.n());
      PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(entry.payload.size()));
      out += entry.payload;
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ValidationError("cannot write index file: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw ValidationError("failed writing index file: " + path);
}

FusedIndex FusedIndex::Load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open index file: " + path);
  const std::string data((std::istreambuf_iterator<char>(file)),
                         std::istreambuf_iterator<char>());

  Reader reader(data, path);
  if (reader.Bytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw ValidationError("not an index file: " + path);
  }
  const auto version = reader.Get<std::uint32_t>();
  if (version != kFormatVersion) {
    throw ValidationError("unsupported index format version " +
                          std::to_string(version));
  }
  const auto dimension = reader.Get<std::uint64_t>();
  const auto count = reader.Get<std::uint64_t>();
  if (count > 0 && dimension == 0) {
    throw ValidationError("index file has entries but dimension 0");
  }

  FusedIndex index(dimension);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string chunk_id(reader.Bytes(reader.Get<std::uint32_t>()));
    std::vector<double> direction_sum(dimension);
    for (double& x : direction_sum) x = reader.GetDouble();
    const double k = reader.GetDouble();
    const auto n = reader.Get<std::uint64_t>();
    IndexEntry entry{std::move(chunk_id),
                     FusedVector::FromParts(std::move(direction_sum), k, n),
                     std::string(reader.Bytes(reader.Get<std::uint32_t>()))};
    if (index.positions_.count(entry.chunk_id) > 0) {
      throw ValidationError("duplicate chunk id in index file: " + entry.chunk_id);
    }
    index.Upsert(std::move(entry));
  }
  if (!reader.AtEnd()) throw ValidationError("trailing bytes in index file: " + path);
  return index;
}

void FusedIndex::ExportJsonLines(std::ostream& out) const {
  std::shared_lock lock(mu_);
  for (const IndexEntry& entry : entries_) {
    nlohmann::ordered_json j;
    j["chunk_id"] = entry.chunk_id;
    j["k"] = entry.fused.k();
    j["n"] = entry.fused.n();
    j["v_f"] = entry.fused.direction_sum();
    j["payload"] = entry.payload;
    out << j.dump() << '\n';
  }
}

}  // namespace chunkforge
