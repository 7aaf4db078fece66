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

#ifndef EMOJIPROBE_EMOJI_HPP
#define EMOJIPROBE_EMOJI_HPP

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emojiprobe::emoji {

inline constexpr char32_t kZwj = U'‍';
inline constexpr char32_t kVs16 = U'️';
inline constexpr char32_t kVs15 = U'︎';
inline constexpr char32_t kKeycapCombiner = U'⃣';

bool is_regional_indicator(char32_t cp);
bool is_skin_tone_modifier(char32_t cp);
bool is_tag_character(char32_t cp);  // U+E0020..U+E007F incl. terminator
bool is_keycap_base(char32_t cp);    // '#', '*', '0'..'9'
// Codepoints that start a span on their own (emoji presentation by default).
bool is_emoji_presentation(char32_t cp);
// Codepoints that need VS16 or a skin-tone modifier to start a span.
bool is_text_presentation(char32_t cp);
bool is_modifier_base(char32_t cp);

// A validated emoji codepoint sequence, possibly multi-codepoint (ZWJ
// sequences, flags, keycaps, skin tones, tag sequences).
class EmojiSequence {
 public:
  EmojiSequence() = default;
  // Validates the structural invariants: allowed codepoint classes only,
  // ZWJ never first or last, skin tones only after modifier bases, regional
  // indicators in pairs. Throws InvalidArgument on violation.
  static EmojiSequence from_codepoints(std::u32string codepoints);
  static EmojiSequence from_utf8(std::string_view utf8);
  static std::optional<EmojiSequence> try_from_utf8(std::string_view utf8);

  const std::u32string& codepoints() const { return codepoints_; }
  std::string to_utf8() const;
  // Uppercase hex codepoints joined by '-', with VS16 removed, so that
  // fully-qualified and unqualified variants of the same emoji share a key.
  std::string canonical_key() const;
  // Uppercase hex codepoints joined by '-', nothing removed.
  std::string hex() const;

  bool operator==(const EmojiSequence& other) const {
    return codepoints_ == other.codepoints_;
  }

 private:
  std::u32string codepoints_;
};

struct EmojiSpan {
  size_t begin = 0;  // codepoint index into the NFC-normalized text
  size_t end = 0;    // exclusive
  EmojiSequence sequence;
};

// Greedy longest-match segmentation over the emoji sequence grammar:
// base -> optional skin-tone modifier -> optional VS16 -> optional tag
// sequence -> (ZWJ -> base ...)*, plus regional-indicator pairs and keycaps.
// The input is NFC-normalized before scanning; span indices refer to the
// normalized codepoint stream. Lone ZWJ, lone VS16, lone regional
// indicators and other stray combiners are ordinary text, never errors.
std::vector<EmojiSpan> parse_emoji_spans(std::string_view utf8_text);
std::vector<EmojiSpan> parse_emoji_spans(const std::u32string& codepoints);

struct EmojiMeta {
  EmojiSequence sequence;
  std::string short_name;
  std::string category;  // one of the ten inventory categories
  std::vector<std::string> keywords;
};

// The closed ten-category set of the inventory.
const std::vector<std::string>& inventory_categories();
bool is_inventory_category(std::string_view name);

// Immutable after load; safe for concurrent lookups.
class EmojiInventory {
 public:
  // File format: one record per line,
  //   <hex codepoints joined by '-'>\t<short_name>\t<category>\t<keywords>
  // '#' lines are comments; a comment matching "# version: <label>" sets
  // the version label. Malformed lines and duplicate sequences are errors.
  static EmojiInventory load(const std::string& path);
  static EmojiInventory from_string(std::string_view text,
                                    const std::string& origin = "<memory>");

  size_t size() const { return order_.size(); }
  const std::string& version_label() const { return version_label_; }
  const EmojiMeta* find(const EmojiSequence& seq) const;
  std::optional<std::string> category_of(const EmojiSequence& seq) const;
  const std::vector<EmojiMeta>& entries() const { return order_; }

 private:
  std::vector<EmojiMeta> order_;
  std::unordered_map<std::string, size_t> by_key_;
  std::string version_label_;
};

}  // namespace emojiprobe::emoji

#endif  // EMOJIPROBE_EMOJI_HPP
