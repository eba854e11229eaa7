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

#include "chunkforge/chunker.h"

#include <map>
#include <set>
#include <utility>

#include "chunkforge/errors.h"
#include "json.hpp"

namespace chunkforge {
namespace {

struct Range {
  std::size_t begin;
  std::size_t end;
  std::size_t tokens;
};

class TokenSums {
 public:
  explicit TokenSums(std::span<const Block> blocks) : sums_(blocks.size() + 1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      sums_[i + 1] = sums_[i] + blocks[i].token_count;
    }
  }

  std::size_t operator()(std::size_t begin, std::size_t end) const {
    return sums_[end] - sums_[begin];
  }

  Range MakeRange(std::size_t begin, std::size_t end) const {
    return Range{begin, end, (*this)(begin, end)};
  }

 private:
  std::vector<std::size_t> sums_;
};

// Splits every range longer than max_tokens at its most probable internal
// gap until each piece fits or is a single block. With min_side > 0 only
// gaps leaving both sides with at least min_side tokens are considered,
// falling back to all gaps when none qualify.
std::vector<Range> SplitRanges(const std::vector<Range>& input,
                               const TokenSums& sums,
                               const BoundaryProbs& probs,
                               std::size_t max_tokens, std::size_t min_side) {
  std::vector<Range> out;
  std::vector<Range> stack;
  for (const Range& top : input) {
    stack.push_back(top);
    while (!stack.empty()) {
      const Range r = stack.back();
      stack.pop_back();
      if (r.tokens <= max_tokens || r.end - r.begin == 1) {
        out.push_back(r);
        continue;
      }
      std::size_t best = r.end;  // cut position: new chunk starts here
      std::size_t fallback = r.end;
      for (std::size_t cut = r.begin + 1; cut < r.end; ++cut) {
        const double p = probs[cut - 1];
        if (fallback == r.end || p > probs[fallback - 1]) fallback = cut;
        if (min_side > 0 && (sums(r.begin, cut) < min_side ||
                             sums(cut, r.end) < min_side)) {
          continue;
        }
        if (best == r.end || p > probs[best - 1]) best = cut;
      }
      const std::size_t cut = best != r.end ? best : fallback;
      // Right half first so the left half is processed next.
      stack.push_back(sums.MakeRange(cut, r.end));
      stack.push_back(sums.MakeRange(r.begin, cut));
    }
  }
  return out;
}

// How strongly a short chunk should avoid merging into `neighbor`: a lone
// oversize block is worst, then any merge that would exceed max_tokens.
int MergePenalty(const Range& chunk, const Range& neighbor, std::size_t max_tokens) {
  if (neighbor.end - neighbor.begin == 1 && neighbor.tokens > max_tokens) return 2;
  return chunk.tokens + neighbor.tokens > max_tokens ? 1 : 0;
}

std::vector<Range> MergeRanges(const std::vector<Range>& input,
                               const BoundaryProbs& probs,
                               std::size_t min_tokens, std::size_t max_tokens) {
  std::map<std::size_t, Range> by_begin;
  std::set<std::pair<std::size_t, std::size_t>> short_ones;  // (tokens, begin)
  for (const Range& r : input) {
    by_begin.emplace(r.begin, r);
    if (r.tokens < min_tokens) short_ones.emplace(r.tokens, r.begin);
  }

  while (!short_ones.empty() && by_begin.size() > 1) {
    const auto it = by_begin.find(short_ones.begin()->second);
    short_ones.erase(short_ones.begin());

    const bool first = it == by_begin.begin();
    const bool last = std::next(it) == by_begin.end();
    bool merge_left;
    if (first) {
      merge_left = false;
    } else if (last) {
      merge_left = true;
    } else {
      const int left_penalty = MergePenalty(it->second, std::prev(it)->second, max_tokens);
      const int right_penalty = MergePenalty(it->second, std::next(it)->second, max_tokens);
      if (left_penalty != right_penalty) {
        merge_left = left_penalty < right_penalty;
      } else {
        const double left_prob = probs[it->second.begin - 1];
        const double right_prob = probs[it->second.end - 1];
        merge_left = left_prob <= right_prob;
      }
    }

    auto left = merge_left ? std::prev(it) : it;
    auto right = std::next(left);
    const Range merged{left->second.begin, right->second.end,
                       left->second.tokens + right->second.tokens};
    for (auto victim : {left, right}) {
      short_ones.erase({victim->second.tokens, victim->second.begin});
    }
    by_begin.erase(left, std::next(right));
    by_begin.emplace(merged.begin, merged);
    if (merged.tokens < min_tokens) short_ones.emplace(merged.tokens, merged.begin);
  }

  std::vector<Range> out;
  out.reserve(by_begin.size());
  for (const auto& [begin, r] : by_begin) out.push_back(r);
  return out;
}

std::vector<Range> ToRanges(const std::vector<Chunk>& chunks) {
  std::vector<Range> ranges;
  ranges.reserve(chunks.size());
  for (const Chunk& c : chunks) ranges.push_back(Range{c.begin, c.end, c.token_count});
  return ranges;
}

std::vector<Chunk> ToChunks(std::span<const Block> blocks,
                            const std::vector<Range>& ranges,
                            std::size_t max_tokens) {
  std::vector<Chunk> chunks;
  chunks.reserve(ranges.size());
  for (const Range& r : ranges) {
    Chunk c = MakeChunk(blocks, r.begin, r.end);
    c.oversize = c.size() == 1 && c.token_count > max_tokens;
    chunks.push_back(std::move(c));
  }
  return chunks;
}

void CheckProbs(std::span<const Block> blocks, const BoundaryProbs& probs) {
  if (blocks.empty()) throw EmptyDocumentError("cannot chunk an empty document");
  if (probs.size() != blocks.size() - 1) {
    throw ValidationError("expected " + std::to_string(blocks.size() - 1) +
                          " boundary probabilities, got " +
                          std::to_string(probs.size()));
  }
}

void CheckChunk(std::span<const Block> blocks, const Chunk& chunk) {
  if (chunk.begin >= chunk.end || chunk.end > blocks.size()) {
    throw ValidationError("chunk range is empty or outside the document");
  }
}

}  // namespace

void ChunkerConfig::Validate() const {
  if (!(t1 >= 0.0 && t1 <= 1.0)) throw ValidationError("t1 must lie in [0, 1]");
  if (max_tokens < 1) throw ValidationError("max_tokens must be positive");
  if (min_tokens >= max_tokens) {
    throw ValidationError("min_tokens must be smaller than max_tokens");
  }
}

Chunk MakeChunk(std::span<const Block> blocks, std::size_t begin,
                std::size_t end) {
  Chunk chunk;
  chunk.begin = begin;
  chunk.end = end;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) chunk.text += ' ';
    chunk.text += blocks[i].text;
    chunk.token_count += blocks[i].token_count;
  }
  return chunk;
}

std::vector<Chunk> ThresholdSegment(std::span<const Block> blocks,
                                    const BoundaryProbs& probs, double t1) {
  CheckProbs(blocks, probs);
  std::vector<Chunk> chunks;
  std::size_t begin = 0;
  for (std::size_t gap = 0; gap < probs.size(); ++gap) {
    if (probs[gap] >= t1) {
      chunks.push_back(MakeChunk(blocks, begin, gap + 1));
      begin = gap + 1;
    }
  }
  chunks.push_back(MakeChunk(blocks, begin, blocks.size()));
  return chunks;
}

std::vector<Chunk> SplitLong(std::span<const Block> blocks, const Chunk& chunk,
                             const BoundaryProbs& probs,
                             std::size_t max_tokens) {
  CheckProbs(blocks, probs);
  CheckChunk(blocks, chunk);
  const TokenSums sums(blocks);
  return ToChunks(blocks,
                  SplitRanges({sums.MakeRange(chunk.begin, chunk.end)}, sums,
                              probs, max_tokens, 0),
                  max_tokens);
}

std::vector<Chunk> MergeShort(std::span<const Block> blocks,
                              const std::vector<Chunk>& chunks,
                              const BoundaryProbs& probs,
                              std::size_t min_tokens, std::size_t max_tokens) {
  CheckProbs(blocks, probs);
  std::vector<Chunk> out;
  for (const Range& r : MergeRanges(ToRanges(chunks), probs, min_tokens, max_tokens)) {
    out.push_back(MakeChunk(blocks, r.begin, r.end));
  }
  return out;
}

std::vector<Chunk> ChunkDocument(std::span<const Block> blocks,
                                 const BoundaryProbs& probs,
                                 const ChunkerConfig& config) {
  config.Validate();
  CheckProbs(blocks, probs);
  const TokenSums sums(blocks);

  std::vector<Range> ranges;
  std::size_t begin = 0;
  for (std::size_t gap = 0; gap < probs.size(); ++gap) {
    if (probs[gap] >= config.t1) {
      ranges.push_back(sums.MakeRange(begin, gap + 1));
      begin = gap + 1;
    }
  }
  ranges.push_back(sums.MakeRange(begin, blocks.size()));

  ranges = SplitRanges(ranges, sums, probs, config.max_tokens, 0);
  ranges = MergeRanges(ranges, probs, config.min_tokens, config.max_tokens);
  ranges = SplitRanges(ranges, sums, probs, config.max_tokens, config.min_tokens);
  return ToChunks(blocks, ranges, config.max_tokens);
}

std::string ChunkToJsonLine(const std::string& doc_id, std::size_t chunk_index,
                            const Chunk& chunk,
                            const std::string& tokenizer_id) {
  nlohmann::ordered_json j;
  j["doc_id"] = doc_id;
  j["chunk_index"] = chunk_index;
  j["block_start"] = chunk.begin;
  j["block_end"] = chunk.end;
  j["token_count"] = chunk.token_count;
  j["text"] = chunk.text;
  j["tokenizer"] = tokenizer_id;
  return j.dump();
}

}  // namespace chunkforge
