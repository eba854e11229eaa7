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

#ifndef CHUNKFORGE_RUN_CONFIG_H_
#define CHUNKFORGE_RUN_CONFIG_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "chunkforge/chunker.h"
#include "chunkforge/scorer.h"
#include "chunkforge/window.h"

namespace chunkforge {

// Everything a run needs. Every field has a default; a config file only
// overrides the keys it mentions. The file mirrors ToJson():
//
//   {"scorer": {"kind", "endpoint", "prob_file", "seed"},
//    "window": {"capacity_tokens", "overlap_ratio"},
//    "chunker": {"t1", "max_tokens", "min_tokens"},
//    "search": {"top_k"},
//    "tokenizer": "whitespace", "separator_prefix": "========", "workers": 4}
struct RunConfig {
  ScorerConfig scorer;
  WindowOptions window;
  ChunkerConfig chunker;
  std::size_t top_k = 10;
  std::string tokenizer = "whitespace";
  std::string separator_prefix = "========";
  std::size_t workers = 4;

  // Cross-field checks. Throws ValidationError.
  void Validate() const;

  // The scorer config with its capacity taken from the window settings.
  ScorerConfig EffectiveScorer() const;

  std::string ToJson() const;

  // Overlays the keys present in `json_text` onto this config. Unknown keys
  // and wrongly typed values throw ValidationError.
  void MergeJson(std::string_view json_text);
  void MergeFile(const std::string& path);
};

}  // namespace chunkforge

#endif  // CHUNKFORGE_RUN_CONFIG_H_
