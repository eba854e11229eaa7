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

#include "chunkforge/tokenizer.h"

#include "chunkforge/errors.h"
#include "text_util.h"

namespace chunkforge {

std::size_t WhitespaceTokenizer::Count(std::string_view text) const {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::unique_ptr<Tokenizer> MakeTokenizer(std::string_view id) {
  if (id == "whitespace") return std::make_unique<WhitespaceTokenizer>();
  throw ValidationError("unknown tokenizer: " + std::string(id));
}

}  // namespace chunkforge
