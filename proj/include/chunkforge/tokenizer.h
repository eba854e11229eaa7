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

#ifndef CHUNKFORGE_TOKENIZER_H_
#define CHUNKFORGE_TOKENIZER_H_

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace chunkforge {

// Counts tokens in a piece of text. Implementations must be deterministic
// and monotone under concatenation: Count(a + b) >= max(Count(a), Count(b)).
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual std::size_t Count(std::string_view text) const = 0;

  // Identifier recorded alongside every output produced with this tokenizer.
  virtual std::string Id() const = 0;
};

// Counts maximal runs of non-whitespace bytes.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  std::size_t Count(std::string_view text) const override;
  std::string Id() const override { return "whitespace"; }
};

// Looks up a tokenizer by identifier. Throws ValidationError for unknown ids.
std::unique_ptr<Tokenizer> MakeTokenizer(std::string_view id);

}  // namespace chunkforge

#endif  // CHUNKFORGE_TOKENIZER_H_
