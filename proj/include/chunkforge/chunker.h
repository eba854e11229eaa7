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

#ifndef CHUNKFORGE_CHUNKER_H_
#define CHUNKFORGE_CHUNKER_H_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "chunkforge/blocker.h"
#include "chunkforge/scorer.h"

namespace chunkforge {

// A contiguous block range [begin, end) of a document.
struct Chunk {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t token_count = 0;
  // Member block texts joined by single spaces.
  std::string text;
  // Single block longer than max_tokens; it cannot be split further.
  bool oversize = false;

  std::size_t size() const { return end - begin; }

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkerConfig {
  double t1 = 0.5;
  std::size_t max_tokens = 700;
  std::size_t min_tokens = 85;

  // Throws ValidationError unless t1 is in [0, 1], max_tokens >= 1 and
  // min_tokens < max_tokens.
  void Validate() const;
};

Chunk MakeChunk(std::span<const Block> blocks, std::size_t begin,
                std::size_t end);

// Stage 1: cut after block i whenever probs[i] >= t1.
std::vector<Chunk> ThresholdSegment(std::span<const Block> blocks,
                                    const BoundaryProbs& probs, double t1);

// Stage 2: while a chunk exceeds max_tokens and has an internal gap, cut it
// at its most probable internal gap (leftmost on ties) and recurse on both
// halves.
std::vector<Chunk> SplitLong(std::span<const Block> blocks, const Chunk& chunk,
                             const BoundaryProbs& probs,
                             std::size_t max_tokens);

// Stage 3: repeatedly take the smallest chunk below min_tokens (leftmost on
// ties) and merge it into the neighbour across the less probable bounding
// gap. The first chunk merges right, the last merges left, equal
// probabilities merge left. Stops when no chunk is short or one remains.
// With a max_tokens limit, a middle chunk first avoids a neighbour that is a
// lone oversize block, then one the merge would push over the limit; the
// probabilities decide only between equally acceptable neighbours.
std::vector<Chunk> MergeShort(std::span<const Block> blocks,
                              const std::vector<Chunk>& chunks,
                              const BoundaryProbs& probs,
                              std::size_t min_tokens,
                              std::size_t max_tokens =
                                  std::numeric_limits<std::size_t>::max());

// Full heuristic: ThresholdSegment, SplitLong on every chunk, MergeShort,
// then one final split pass over chunks the merge pushed past max_tokens.
// The final pass prefers the most probable gap that leaves both sides with
// at least min_tokens and falls back to the most probable gap overall.
//
// Throws ValidationError if probs.size() != blocks.size() - 1 or the config
// is invalid.
std::vector<Chunk> ChunkDocument(std::span<const Block> blocks,
                                 const BoundaryProbs& probs,
                                 const ChunkerConfig& config);

// {"doc_id", "chunk_index", "block_start", "block_end", "token_count",
//  "text", "tokenizer"}
std::string ChunkToJsonLine(const std::string& doc_id, std::size_t chunk_index,
                            const Chunk& chunk, const std::string& tokenizer_id);

}  // namespace chunkforge

#endif  // CHUNKFORGE_CHUNKER_H_
