// Copyright 2026 The Emojiprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMOJIPROBE_TOKLAB_HPP
#define EMOJIPROBE_TOKLAB_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emojiprobe/emoji.hpp"

namespace emojiprobe::toklab {

// The byte-level BPE pre-tokenizer split convention is part of the vocab
// data, not the code. This engine interprets the GPT-2-family pattern
// dialect: alternations of literal contraction groups, character classes
// over \p{L}, \p{N}, \s, \r, \n with ?, +, *, {m,n} quantifiers, and the
// trailing-whitespace lookahead \s+(?!\S).
class PreTokenizer {
 public:
  explicit PreTokenizer(std::string_view pattern);
  // Splits text into pretoken codepoint runs, concatenation-preserving.
  std::vector<std::u32string> split(std::u32string_view text) const;
  const std::string& pattern() const { return pattern_; }

  static const std::string& gpt2_pattern();

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::string pattern_;
};

// The standard byte-level BPE printable remapping: every byte value gets a
// stable printable codepoint so vocab files stay line- and space-safe.
const std::array<char32_t, 256>& byte_to_unit();
// -1 for codepoints that are not byte units.
int unit_to_byte(char32_t cp);

class BpeVocab {
 public:
  // vocab file: one token per line, id = line index, or a JSON object
  // mapping token -> id. merges file: one "left right" pair per line, rank
  // = line order ("#version" header lines are skipped). pattern_path is
  // optional; when empty, "<merges_path minus extension>.pattern" is used
  // if present, else the GPT-2 pattern.
  static BpeVocab load(const std::string& vocab_path,
                       const std::string& merges_path,
                       const std::string& pattern_path = "");
  static BpeVocab from_strings(std::string_view vocab_text,
                               std::string_view merges_text,
                               std::string_view pattern,
                               const std::string& origin = "<memory>");

  std::vector<uint32_t> encode(std::string_view text) const;
  std::string decode(std::span<const uint32_t> ids) const;

  size_t size() const { return id_to_token_.size(); }
  size_t merge_count() const { return n_merges_; }
  const std::string& token_text(uint32_t id) const;
  const PreTokenizer& pretokenizer() const { return pretokenizer_; }

 private:
  std::unordered_map<std::string, uint32_t> token_to_id_;
  std::vector<std::string> id_to_token_;      // remapped (printable) space
  std::vector<std::string> id_to_bytes_;      // raw byte content
  // (left id, right id) -> (rank, merged id)
  std::unordered_map<uint64_t, std::pair<uint32_t, uint32_t>> merges_;
  uint32_t byte_unit_ids_[256] = {};
  size_t n_merges_ = 0;
  PreTokenizer pretokenizer_{PreTokenizer::gpt2_pattern()};

  std::vector<uint32_t> encode_pretoken(std::string_view bytes) const;
};

struct FragmentationRow {
  emoji::EmojiSequence sequence;
  std::string text;  // exactly what was tokenized
  std::vector<uint32_t> token_ids;
};

struct TokenizationReport {
  std::vector<FragmentationRow> per_emoji;
  size_t n_emojis = 0;
  size_t n_multi_token = 0;
  double multi_token_fraction = 0.0;
};

// Tokenizes every inventory emoji (restricted to canonical single-codepoint
// entries when single_char_only is set, in which case the bare codepoint is
// what gets tokenized) and reports how many fragment into multiple tokens.
TokenizationReport fragmentation_stats(const emoji::EmojiInventory& inventory,
                                       const BpeVocab& vocab,
                                       bool single_char_only);

struct OverlapRecord {
  emoji::EmojiSequence sequence;
  std::string word;
  std::vector<uint32_t> emoji_tokens;
  std::vector<uint32_t> word_tokens;
  double jaccard = 0.0;  // over token-id sets
};

OverlapRecord overlap(const emoji::EmojiSequence& seq, const std::string& word,
                      const BpeVocab& vocab);

}  // namespace emojiprobe::toklab

#endif  // EMOJIPROBE_TOKLAB_HPP
