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

#include "chunkforge/blocker.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <utility>

#include "chunkforge/errors.h"
#include "chunkforge/logging.h"
#include "json.hpp"
#include "text_util.h"

namespace chunkforge {
namespace {

constexpr std::array<std::string_view, 40> kAbbreviations = {
    "Dr.",   "Mr.",  "Mrs.",  "Ms.",   "Prof.", "Sr.",   "Jr.",  "St.",
    "Mt.",   "vs.",  "etc.",  "e.g.",  "i.e.",  "U.S.",  "U.K.", "U.N.",
    "Inc.",  "Ltd.", "Co.",   "Corp.", "No.",   "Fig.",  "Gen.", "Gov.",
    "Sen.",  "Rep.", "Lt.",   "Col.",  "Capt.", "Jan.",  "Feb.", "Mar.",
    "Apr.",  "Aug.", "Sept.", "Oct.",  "Nov.",  "Dec.",  "al.",  "approx.",
};

bool IsTerminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool IsCloser(char c) {
  return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}';
}

bool IsOpener(char c) {
  return c == '"' || c == '\'' || c == '(' || c == '[' || c == '{';
}

Block MakeBlock(std::string_view source, CharSpan span, std::size_t index,
                const Tokenizer& tokenizer) {
  Block block;
  block.index = index;
  block.text = std::string(source.substr(span.begin, span.end - span.begin));
  block.token_count = std::max<std::size_t>(1, tokenizer.Count(block.text));
  block.span = span;
  return block;
}

}  // namespace

std::size_t Document::TotalTokens() const {
  return std::accumulate(
      blocks.begin(), blocks.end(), std::size_t{0},
      [](std::size_t sum, const Block& b) { return sum + b.token_count; });
}

bool IsAbbreviation(std::string_view word) {
  while (!word.empty() && IsOpener(word.front())) word.remove_prefix(1);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

std::vector<Block> SplitSentences(std::string_view text,
                                  const Tokenizer& tokenizer) {
  std::vector<Block> blocks;
  const std::size_t n = text.size();
  bool open = false;
  std::size_t start = 0;
  std::size_t word_start = 0;
  std::size_t last_content = 0;

  auto emit = [&](std::size_t end) {
    blocks.push_back(
        MakeBlock(text, CharSpan{start, end}, blocks.size(), tokenizer));
    open = false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c == '\n') {
      if (open) emit(last_content + 1);
      continue;
    }
    if (IsSpace(c)) continue;
    if (!open) {
      open = true;
      start = i;
    }
    if (i == 0 || IsSpace(text[i - 1])) word_start = i;
    last_content = i;
    if (!IsTerminator(c)) continue;

    std::size_t j = i + 1;
    while (j < n && (IsTerminator(text[j]) || IsCloser(text[j]))) ++j;
    if (j < n && !IsSpace(text[j])) continue;
    // A lone period may belong to an abbreviation rather than end a sentence.
    const bool lone_period = c == '.' && (j == i + 1 || !IsTerminator(text[i + 1]));
    if (lone_period && IsAbbreviation(text.substr(word_start, i + 1 - word_start))) {
      continue;
    }
    last_content = j - 1;
    i = j - 1;
    emit(j);
  }
  if (open) emit(last_content + 1);

  if (blocks.empty()) throw EmptyDocumentError("document has no content");
  return blocks;
}

Document ImportWiki727k(std::string_view raw, const Tokenizer& tokenizer,
                        std::string id, const WikiImportOptions& options) {
  Document doc;
  doc.id = std::move(id);
  std::vector<bool> section_end;

  std::size_t line_begin = 0;
  while (line_begin <= raw.size()) {
    std::size_t line_end = raw.find('\n', line_begin);
    if (line_end == std::string_view::npos) line_end = raw.size();
    std::string_view line = raw.substr(line_begin, line_end - line_begin);
    const std::size_t offset = line_begin;
    line_begin = line_end + 1;

    const std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;

    const std::string_view prefix = options.separator_prefix;
    if (!prefix.empty() && line.substr(0, prefix.size()) == prefix) {
      const std::string_view rest = Trim(line.substr(prefix.size()));
      if (rest.empty() || rest.front() == ',') {
        if (!section_end.empty()) section_end.back() = true;
        continue;
      }
      LogWarning("malformed separator line treated as content: " +
                 std::string(trimmed));
    }

    const std::size_t begin =
        offset + static_cast<std::size_t>(trimmed.data() - line.data());
    doc.blocks.push_back(MakeBlock(raw, CharSpan{begin, begin + trimmed.size()},
                                   doc.blocks.size(), tokenizer));
    section_end.push_back(false);
  }

  if (doc.blocks.empty()) {
    throw EmptyDocumentError("document '" + doc.id +
                             "' has no content sentences");
  }
  section_end.pop_back();  // the final sentence carries no label
  doc.gold_labels = std::move(section_end);
  return doc;
}

Document MakeDocument(std::string id, const std::vector<std::string>& texts,
                      const Tokenizer& tokenizer,
                      std::optional<std::vector<bool>> gold_labels) {
  if (texts.empty()) {
    throw EmptyDocumentError("document '" + id + "' has no blocks");
  }
  if (gold_labels && gold_labels->size() != texts.size() - 1) {
    throw ValidationError("document '" + id + "': expected " +
                          std::to_string(texts.size() - 1) +
                          " gold labels, got " +
                          std::to_string(gold_labels->size()));
  }
  Document doc;
  doc.id = std::move(id);
  std::size_t offset = 0;
  for (const std::string& text : texts) {
    if (Trim(text).empty()) {
      throw ValidationError("document '" + doc.id + "' has an empty block");
    }
    Block block;
    block.index = doc.blocks.size();
    block.text = text;
    block.token_count = std::max<std::size_t>(1, tokenizer.Count(text));
    block.span = CharSpan{offset, offset + text.size()};
    offset += text.size() + 1;
    doc.blocks.push_back(std::move(block));
  }
  doc.gold_labels = std::move(gold_labels);
  return doc;
}

std::string ToJsonLine(const Document& doc, const Tokenizer& tokenizer) {
  nlohmann::ordered_json j;
  j["id"] = doc.id;
  auto& blocks = j["blocks"] = nlohmann::ordered_json::array();
  for (const Block& b : doc.blocks) blocks.push_back(b.text);
  if (doc.gold_labels) {
    j["gold_labels"] = *doc.gold_labels;
  } else {
    j["gold_labels"] = nullptr;
  }
  j["tokenizer"] = tokenizer.Id();
  return j.dump();
}

Document ParseJsonLine(std::string_view line, const Tokenizer& tokenizer) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed document line: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
      !j.contains("blocks") || !j["blocks"].is_array()) {
    throw ValidationError("document line needs string 'id' and array 'blocks'");
  }
  std::vector<std::string> texts;
  for (const auto& b : j["blocks"]) {
    if (!b.is_string()) throw ValidationError("block entries must be strings");
    texts.push_back(b.get<std::string>());
  }
  std::optional<std::vector<bool>> labels;
  if (j.contains("gold_labels") && !j["gold_labels"].is_null()) {
    if (!j["gold_labels"].is_array()) {
      throw ValidationError("'gold_labels' must be an array of booleans");
    }
    labels.emplace();
    for (const auto& l : j["gold_labels"]) {
      if (!l.is_boolean()) {
        throw ValidationError("'gold_labels' must be an array of booleans");
      }
      labels->push_back(l.get<bool>());
    }
  }
  return MakeDocument(j["id"].get<std::string>(), texts, tokenizer,
                      std::move(labels));
}

}  // namespace chunkforge
