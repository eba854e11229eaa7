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

#include "chunkforge/window.h"

#include <algorithm>
#include <future>
#include <string>

#include "chunkforge/errors.h"
#include "chunkforge/logging.h"

namespace chunkforge {
namespace {

class PrefixSums {
 public:
  explicit PrefixSums(std::span<const Block> blocks) : sums_(blocks.size() + 1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      sums_[i + 1] = sums_[i] + blocks[i].token_count;
    }
  }

  std::size_t Tokens(std::size_t begin, std::size_t end) const {
    return sums_[end] - sums_[begin];
  }

  // Largest end such that [begin, end) fits in capacity, but never less than
  // begin + 1.
  std::size_t GreedyEnd(std::size_t begin, std::size_t capacity) const {
    const std::size_t limit = sums_[begin] + capacity;
    const auto it = std::upper_bound(sums_.begin() + begin + 1, sums_.end(), limit);
    const auto end = static_cast<std::size_t>(it - sums_.begin()) - 1;
    return std::max(end, begin + 1);
  }

  std::size_t size() const { return sums_.size() - 1; }

 private:
  std::vector<std::size_t> sums_;
};

}  // namespace

WindowPlan PlanWindows(std::span<const Block> blocks,
                       std::size_t capacity_tokens, double overlap_ratio) {
  if (blocks.empty()) throw EmptyDocumentError("cannot plan windows over no blocks");
  if (capacity_tokens < 1) throw ValidationError("capacity must be at least 1 token");
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 0.5)) {
    throw ValidationError("overlap ratio must lie in [0, 0.5)");
  }

  WindowPlan plan;
  plan.block_count = blocks.size();
  plan.capacity_tokens = capacity_tokens;
  plan.overlap_ratio = overlap_ratio;

  const PrefixSums sums(blocks);
  const std::size_t n = blocks.size();
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = sums.GreedyEnd(begin, capacity_tokens);
    const std::size_t tokens = sums.Tokens(begin, end);
    plan.windows.push_back(Window{begin, end, tokens, tokens > capacity_tokens});
    if (end == n) break;

    std::size_t next = end;
    for (std::size_t shared = 1; end - shared > begin; ++shared) {
      const std::size_t start = end - shared;
      const std::size_t next_end = sums.GreedyEnd(start, capacity_tokens);
      // Starting earlier never reaches further, so stop at the first start
      // that no longer extends past this window.
      if (next_end <= end) break;
      next = start;
      if (static_cast<double>(sums.Tokens(start, end)) >=
          overlap_ratio * static_cast<double>(sums.Tokens(start, next_end))) {
        break;
      }
    }
    if (next == end) plan.uncovered_gaps.push_back(end - 1);
    begin = next;
  }
  return plan;
}

BoundaryProbs FuseProbs(const WindowPlan& plan,
                        std::span<const BoundaryProbs> per_window) {
  if (per_window.size() != plan.windows.size()) {
    throw ValidationError("expected predictions for " +
                          std::to_string(plan.windows.size()) +
                          " windows, got " + std::to_string(per_window.size()));
  }
  for (std::size_t w = 0; w < plan.windows.size(); ++w) {
    if (per_window[w].size() != plan.windows[w].size() - 1) {
      throw ValidationError("window " + std::to_string(w) + " has " +
                            std::to_string(per_window[w].size()) +
                            " predictions, expected " +
                            std::to_string(plan.windows[w].size() - 1));
    }
  }
  if (plan.block_count == 0) return {};

  const std::size_t gaps = plan.block_count - 1;
  BoundaryProbs fused(gaps, 0.0);
  std::vector<std::size_t> seen(gaps, 0);
  std::vector<double> lo(gaps, 1.0);
  std::vector<double> hi(gaps, 0.0);
  // Windows are ascending, so each window's predictions fold into a running
  // mean in plan order. Identical contributions leave the mean untouched.
  for (std::size_t w = 0; w < plan.windows.size(); ++w) {
    const Window& window = plan.windows[w];
    for (std::size_t local = 0; local + 1 < window.size(); ++local) {
      const std::size_t gap = window.begin + local;
      if (gap >= gaps) throw InvariantError("window extends past the document");
      const double value = per_window[w][local];
      const std::size_t count = ++seen[gap];
      lo[gap] = std::min(lo[gap], value);
      hi[gap] = std::max(hi[gap], value);
      if (count == 1) {
        fused[gap] = value;
      } else {
        fused[gap] += (value - fused[gap]) / static_cast<double>(count);
        // Keep the mean inside the range of its contributions.
        fused[gap] = std::clamp(fused[gap], lo[gap], hi[gap]);
      }
    }
  }

  std::size_t next_uncovered = 0;
  for (std::size_t gap = 0; gap < gaps; ++gap) {
    const bool uncovered = next_uncovered < plan.uncovered_gaps.size() &&
                           plan.uncovered_gaps[next_uncovered] == gap;
    if (uncovered) ++next_uncovered;
    if (seen[gap] > 0) continue;
    if (!uncovered) {
      throw InvariantError("gap " + std::to_string(gap) +
                           " is not covered by any window");
    }
    fused[gap] = kForcedBoundaryProb;
  }

  return fused;
}

BoundaryProbs ScoreDocument(const Document& doc, const BoundaryScorer& scorer,
                            const WindowOptions& options) {
  const WindowPlan plan =
      PlanWindows(doc.blocks, options.capacity_tokens, options.overlap_ratio);
  if (!plan.uncovered_gaps.empty()) {
    LogWarning("document '" + doc.id + "': " +
               std::to_string(plan.uncovered_gaps.size()) +
               " gap(s) exceed scorer capacity and are forced to boundaries");
  }

  const std::span<const Block> blocks(doc.blocks);
  auto score_window = [&](const Window& w) {
    return scorer.Score(
        ScoreRequest{doc.id, w.begin, blocks.subspan(w.begin, w.size())});
  };

  std::vector<BoundaryProbs> per_window;
  per_window.reserve(plan.windows.size());
  if (options.parallel && plan.windows.size() > 1) {
    std::vector<std::future<BoundaryProbs>> pending;
    pending.reserve(plan.windows.size());
    for (const Window& w : plan.windows) {
      pending.push_back(std::async(std::launch::async, score_window, std::cref(w)));
    }
    for (auto& f : pending) per_window.push_back(f.get());
  } else {
    for (const Window& w : plan.windows) per_window.push_back(score_window(w));
  }
  return FuseProbs(plan, per_window);
}

}  // namespace chunkforge
