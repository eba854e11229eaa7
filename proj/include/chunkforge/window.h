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

#ifndef CHUNKFORGE_WINDOW_H_
#define CHUNKFORGE_WINDOW_H_

#include <cstddef>
#include <span>
#include <vector>

#include "chunkforge/blocker.h"
#include "chunkforge/scorer.h"

namespace chunkforge {

// Probability assigned to a gap no window can cover: the two blocks around
// it do not fit in the scorer's capacity together.
inline constexpr double kForcedBoundaryProb = 1.0;

struct Window {
  std::size_t begin = 0;  // first block, inclusive
  std::size_t end = 0;    // last block, exclusive
  std::size_t token_count = 0;
  // A single block whose own token count exceeds the capacity.
  bool oversize = false;

  std::size_t size() const { return end - begin; }
  // True when the window holds both blocks around `gap`.
  bool Covers(std::size_t gap) const { return begin <= gap && gap + 1 < end; }

  friend bool operator==(const Window&, const Window&) = default;
};

struct WindowPlan {
  std::vector<Window> windows;
  std::size_t block_count = 0;
  std::size_t capacity_tokens = 0;
  double overlap_ratio = 0.0;
  // Gaps between two blocks that cannot share a window. Ascending.
  std::vector<std::size_t> uncovered_gaps;
};

struct WindowOptions {
  std::size_t capacity_tokens = 13000;
  double overlap_ratio = 0.10;
  // Score windows concurrently. Results do not depend on this.
  bool parallel = false;
};

// Greedy left-to-right packing. Each window takes the longest run of blocks
// that fits the capacity. The next window starts as late as possible such
// that the blocks it shares with the previous window hold at least
// overlap_ratio times its own token count, sharing at least one block and
// still extending past the previous window. When no start both satisfies the
// ratio and advances, the largest advancing overlap is used; when even one
// shared block cannot advance, the gap is recorded as uncovered.
//
// Throws EmptyDocumentError for no blocks and ValidationError for a
// capacity of 0 or an overlap ratio outside [0, 0.5).
WindowPlan PlanWindows(std::span<const Block> blocks,
                       std::size_t capacity_tokens, double overlap_ratio);

// Averages the predictions of every window that covers each gap. Gaps seen
// by one window pass through unchanged; uncovered gaps get
// kForcedBoundaryProb. Throws ValidationError when per_window does not line
// up with the plan and InvariantError for a gap the plan failed to account
// for.
BoundaryProbs FuseProbs(const WindowPlan& plan,
                        std::span<const BoundaryProbs> per_window);

// Plans windows, scores each one and fuses the results. Returns
// blocks.size() - 1 probabilities.
BoundaryProbs ScoreDocument(const Document& doc, const BoundaryScorer& scorer,
                            const WindowOptions& options = {});

}  // namespace chunkforge

#endif  // CHUNKFORGE_WINDOW_H_
