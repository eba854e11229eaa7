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

#ifndef CHUNKFORGE_BLOCKER_H_
#define CHUNKFORGE_BLOCKER_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chunkforge/tokenizer.h"

namespace chunkforge {

// Half-open byte range [begin, end) into a source document.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

// A sentence-level unit of text. Gaps between adjacent blocks are the
// candidate boundary positions.
struct Block {
  std::size_t index = 0;
  std::string text;
  std::size_t token_count = 0;
  CharSpan span;

  friend bool operator==(const Block&, const Block&) = default;
};

struct Document {
  std::string id;
  std::vector<Block> blocks;
  // gold_labels[i] is true when a section ends after block i. Holds
  // blocks.size() - 1 entries when present.
  std::optional<std::vector<bool>> gold_labels;

  std::size_t TotalTokens() const;
};

// Splits free-form text into sentence blocks. A sentence ends at '.', '!' or
// '?' (optionally followed by closing quotes or brackets) when the next
// character is whitespace or the end of input, and at every newline.
// Periods ending a known abbreviation ("Dr.", "U.S.", ...) do not end a
// sentence. Throws EmptyDocumentError on whitespace-only input.
std::vector<Block> SplitSentences(std::string_view text,
                                  const Tokenizer& tokenizer);

// True when `word` (the whitespace-delimited token ending in '.') is on the
// built-in abbreviation list.
bool IsAbbreviation(std::string_view word);

struct WikiImportOptions {
  std::string separator_prefix = "========";
};

// Parses one document in the WIKI-727K layout: section separator lines
// starting with the separator prefix, one sentence per line otherwise.
// Separator lines are dropped; a line that starts with the prefix but is not
// followed by ',' or end-of-line is kept as content with a warning.
// Throws EmptyDocumentError if no content lines remain.
Document ImportWiki727k(std::string_view raw, const Tokenizer& tokenizer,
                        std::string id = {},
                        const WikiImportOptions& options = {});

// Canonical one-document-per-line JSON form:
//   {"id": ..., "blocks": [...], "gold_labels": [...], "tokenizer": ...}
// gold_labels is null when the document carries no labels.
std::string ToJsonLine(const Document& doc, const Tokenizer& tokenizer);

// Inverse of ToJsonLine. Token counts are recomputed with `tokenizer`; spans
// index into the blocks joined by '\n'. Throws ValidationError on malformed
// input or a label list of the wrong length.
Document ParseJsonLine(std::string_view line, const Tokenizer& tokenizer);

// Builds a Document from already-split block texts.
Document MakeDocument(std::string id, const std::vector<std::string>& texts,
                      const Tokenizer& tokenizer,
                      std::optional<std::vector<bool>> gold_labels = {});

}  // namespace chunkforge

#endif  // CHUNKFORGE_BLOCKER_H_
