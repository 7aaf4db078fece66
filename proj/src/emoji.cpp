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

#include "emojiprobe/emoji.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "emojiprobe/errors.hpp"
#include "emojiprobe/unicode.hpp"

namespace emojiprobe::emoji {

namespace {

struct CodepointRange {
  char32_t first;
  char32_t last;
};

#include "emoji_ranges.inc"

template <size_t N>
bool in_ranges(const CodepointRange (&ranges)[N], char32_t cp) {
  auto it = std::upper_bound(
      std::begin(ranges), std::end(ranges), cp,
      [](char32_t value, const CodepointRange& r) { return value < r.first; });
  return it != std::begin(ranges) && cp <= std::prev(it)->last;
}

constexpr char32_t kTagTerminator = U'\U000E007F';

std::string hex_of(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%X", static_cast<unsigned>(cp));
  return buf;
}

std::string hex_join(std::u32string_view cps, bool strip_vs16) {
  std::string out;
  for (char32_t cp : cps) {
    if (strip_vs16 && cp == kVs16) continue;
    if (!out.empty()) out += '-';
    out += hex_of(cp);
  }
  return out;
}

}  // namespace

bool is_regional_indicator(char32_t cp) {
  return cp >= U'\U0001F1E6' && cp <= U'\U0001F1FF';
}

bool is_skin_tone_modifier(char32_t cp) {
  return cp >= U'\U0001F3FB' && cp <= U'\U0001F3FF';
}

bool is_tag_character(char32_t cp) {
  return cp >= U'\U000E0020' && cp <= U'\U000E007F';
}

bool is_keycap_base(char32_t cp) {
  return cp == U'#' || cp == U'*' || (cp >= U'0' && cp <= U'9');
}

bool is_emoji_presentation(char32_t cp) {
  return in_ranges(kEmojiPresentationRanges, cp);
}

bool is_text_presentation(char32_t cp) {
  return in_ranges(kTextPresentationRanges, cp);
}

bool is_modifier_base(char32_t cp) {
  return in_ranges(kModifierBaseRanges, cp);
}

namespace {

bool is_base(char32_t cp) {
  return is_emoji_presentation(cp) || is_text_presentation(cp);
}

void validate_sequence(const std::u32string& cps) {
  if (cps.empty()) {
    throw InvalidArgument("emoji sequence must be non-empty");
  }
  size_t n_regional = 0;
  for (char32_t cp : cps) {
    if (is_regional_indicator(cp)) n_regional++;
  }
  if (n_regional > 0) {
    if (cps.size() != 2 || n_regional != 2) {
      throw InvalidArgument(
          "regional indicators form flag pairs; got sequence " +
          hex_join(cps, false));
    }
    return;
  }
  for (size_t i = 0; i < cps.size(); ++i) {
    char32_t cp = cps[i];
    char32_t prev = i > 0 ? cps[i - 1] : 0;
    if (cp == kZwj) {
      if (i == 0 || i + 1 == cps.size() || prev == kZwj) {
        throw InvalidArgument("ZWJ may not start or end a sequence: " +
                              hex_join(cps, false));
      }
    } else if (is_skin_tone_modifier(cp)) {
      if (i == 0) {
        if (cps.size() != 1) {
          throw InvalidArgument(
              "skin-tone modifier must follow a modifier base: " +
              hex_join(cps, false));
        }
      } else if (!is_modifier_base(prev)) {
        throw InvalidArgument(
            "skin-tone modifier must follow a modifier base: " +
            hex_join(cps, false));
      }
    } else if (cp == kVs16) {
      if (i == 0 || !(is_base(prev) || is_keycap_base(prev))) {
        throw InvalidArgument("variation selector must follow a base: " +
                              hex_join(cps, false));
      }
    } else if (cp == kKeycapCombiner) {
      if (i == 0 || !(is_keycap_base(prev) ||
                      (prev == kVs16 && i >= 2 && is_keycap_base(cps[i - 2])))) {
        throw InvalidArgument("keycap combiner must follow '#', '*' or digit: " +
                              hex_join(cps, false));
      }
    } else if (is_tag_character(cp)) {
      // A tag run must terminate the sequence with the tag terminator.
      if (i == 0) {
        throw InvalidArgument("tag characters may not start a sequence");
      }
      size_t j = i;
      while (j < cps.size() && is_tag_character(cps[j]) &&
             cps[j] != kTagTerminator) {
        j++;
      }
      if (j + 1 != cps.size() || cps[j] != kTagTerminator) {
        throw InvalidArgument("unterminated tag sequence: " +
                              hex_join(cps, false));
      }
      return;
    } else if (is_keycap_base(cp)) {
      if (i != 0 || cps.size() < 2) {
        throw InvalidArgument("keycap base must start a keycap sequence: " +
                              hex_join(cps, false));
      }
    } else if (!is_base(cp)) {
      throw InvalidArgument("codepoint U+" + hex_of(cp) +
                            " is not part of the emoji repertoire");
    }
  }
}

}  // namespace

EmojiSequence EmojiSequence::from_codepoints(std::u32string codepoints) {
  validate_sequence(codepoints);
  EmojiSequence seq;
  seq.codepoints_ = std::move(codepoints);
  return seq;
}

EmojiSequence EmojiSequence::from_utf8(std::string_view utf8) {
  return from_codepoints(unicode::decode_utf8(utf8));
}

std::optional<EmojiSequence> EmojiSequence::try_from_utf8(
    std::string_view utf8) {
  try {
    return from_utf8(utf8);
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

std::string EmojiSequence::to_utf8() const {
  return unicode::encode_utf8(codepoints_);
}

std::string EmojiSequence::canonical_key() const {
  std::string key = hex_join(codepoints_, true);
  // A sequence that is nothing but selectors would produce an empty key;
  // such sequences are rejected at validation, keep the raw form as a guard.
  return key.empty() ? hex_join(codepoints_, false) : key;
}

std::string EmojiSequence::hex() const { return hex_join(codepoints_, false); }

namespace {

class Scanner {
 public:
  explicit Scanner(const std::u32string& text) : s_(text), n_(text.size()) {}

  std::vector<EmojiSpan> run() {
    std::vector<EmojiSpan> spans;
    size_t i = 0;
    while (i < n_) {
      char32_t cp = s_[i];
      if (is_regional_indicator(cp)) {
        if (i + 1 < n_ && is_regional_indicator(s_[i + 1])) {
          emit(spans, i, i + 2);
          i += 2;
        } else {
          i += 1;  // lone regional indicator: ordinary text
        }
        continue;
      }
      if (is_keycap_base(cp)) {
        size_t j = i + 1;
        if (j < n_ && s_[j] == kVs16) j++;
        if (j < n_ && s_[j] == kKeycapCombiner) {
          emit(spans, i, j + 1);
          i = j + 1;
        } else {
          i += 1;
        }
        continue;
      }
      if (can_start_element(i)) {
        size_t j = consume_element(i);
        while (j < n_ && s_[j] == kZwj && can_start_element(j + 1)) {
          j = consume_element(j + 1);
        }
        emit(spans, i, j);
        i = j;
        continue;
      }
      i += 1;
    }
    return spans;
  }

 private:
  bool can_start_element(size_t i) const {
    if (i >= n_) return false;
    char32_t cp = s_[i];
    if (is_emoji_presentation(cp)) {
      return !(i + 1 < n_ && s_[i + 1] == kVs15);
    }
    if (is_text_presentation(cp)) {
      if (i + 1 >= n_) return false;
      char32_t next = s_[i + 1];
      return next == kVs16 ||
             (is_skin_tone_modifier(next) && is_modifier_base(cp));
    }
    return false;
  }

  // Pre: can_start_element(i). Consumes base, optional modifier or VS16,
  // optional terminated tag run. Returns the exclusive end index.
  size_t consume_element(size_t i) const {
    size_t j = i + 1;
    if (j < n_ && is_skin_tone_modifier(s_[j]) && is_modifier_base(s_[i])) {
      j++;
    } else if (j < n_ && s_[j] == kVs16) {
      j++;
    }
    if (j < n_ && is_tag_character(s_[j]) && s_[j] != kTagTerminator) {
      size_t k = j;
      while (k < n_ && is_tag_character(s_[k]) && s_[k] != kTagTerminator) k++;
      if (k < n_ && s_[k] == kTagTerminator) j = k + 1;
    }
    return j;
  }

  void emit(std::vector<EmojiSpan>& spans, size_t begin, size_t end) {
    EmojiSpan span;
    span.begin = begin;
    span.end = end;
    span.sequence =
        EmojiSequence::from_codepoints(s_.substr(begin, end - begin));
    spans.push_back(std::move(span));
  }

  const std::u32string& s_;
  size_t n_;
};

}  // namespace

std::vector<EmojiSpan> parse_emoji_spans(const std::u32string& codepoints) {
  return Scanner(codepoints).run();
}

std::vector<EmojiSpan> parse_emoji_spans(std::string_view utf8_text) {
  std::u32string normalized =
      unicode::decode_utf8(unicode::nfc(utf8_text));
  return parse_emoji_spans(normalized);
}

const std::vector<std::string>& inventory_categories() {
  static const std::vector<std::string> kCategories = {
      "Smileys & Emotion", "People & Body", "Component", "Animals & Nature",
      "Food & Drink",      "Travel & Places", "Activities", "Objects",
      "Symbols",           "Flags"};
  return kCategories;
}

bool is_inventory_category(std::string_view name) {
  const auto& cats = inventory_categories();
  return std::find(cats.begin(), cats.end(), name) != cats.end();
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::u32string parse_hex_codepoints(std::string_view field,
                                    const std::string& origin, size_t lineno) {
  std::u32string cps;
  for (const std::string& part : split(field, '-')) {
    if (part.empty()) {
      throw ParseError(origin, lineno, "empty codepoint in sequence");
    }
    char32_t cp = 0;
    for (char c : part) {
      int digit;
      if (c >= '0' && c <= '9') digit = c - '0';
      else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
      else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
      else throw ParseError(origin, lineno, "invalid hex codepoint '" + part + "'");
      cp = cp * 16 + static_cast<char32_t>(digit);
    }
    if (cp > 0x10FFFF) {
      throw ParseError(origin, lineno, "codepoint out of range '" + part + "'");
    }
    cps.push_back(cp);
  }
  return cps;
}

}  // namespace

EmojiInventory EmojiInventory::from_string(std::string_view text,
                                           const std::string& origin) {
  EmojiInventory inv;
  size_t lineno = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t eol = text.find('\n', start);
    std::string_view line = eol == std::string_view::npos
                                ? text.substr(start)
                                : text.substr(start, eol - start);
    start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    lineno++;
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kVersionTag = "# version:";
      if (line.substr(0, kVersionTag.size()) == kVersionTag) {
        std::string label(line.substr(kVersionTag.size()));
        size_t first = label.find_first_not_of(" \t");
        inv.version_label_ =
            first == std::string::npos ? "" : label.substr(first);
      }
      continue;
    }
    auto fields = split(line, '\t');
    if (fields.size() != 4) {
      throw ParseError(origin, lineno,
                       "expected 4 tab-separated fields, got " +
                           std::to_string(fields.size()));
    }
    EmojiMeta meta;
    try {
      meta.sequence = EmojiSequence::from_codepoints(
          parse_hex_codepoints(fields[0], origin, lineno));
    } catch (const InvalidArgument& e) {
      throw ParseError(origin, lineno, e.what());
    }
    meta.short_name = fields[1];
    if (meta.short_name.empty()) {
      throw ParseError(origin, lineno, "short_name must be non-empty");
    }
    meta.category = fields[2];
    if (!is_inventory_category(meta.category)) {
      throw ParseError(origin, lineno,
                       "unknown category '" + meta.category + "'");
    }
    if (!fields[3].empty()) {
      for (auto& kw : split(fields[3], ',')) {
        if (!kw.empty()) meta.keywords.push_back(std::move(kw));
      }
    }
    std::string key = meta.sequence.canonical_key();
    if (!inv.by_key_.emplace(key, inv.order_.size()).second) {
      throw ConflictError(origin + ":" + std::to_string(lineno) +
                          ": duplicate emoji sequence " + key);
    }
    inv.order_.push_back(std::move(meta));
  }
  return inv;
}

EmojiInventory EmojiInventory::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open inventory file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

const EmojiMeta* EmojiInventory::find(const EmojiSequence& seq) const {
  auto it = by_key_.find(seq.canonical_key());
  if (it == by_key_.end()) return nullptr;
  return &order_[it->second];
}

std::optional<std::string> EmojiInventory::category_of(
    const EmojiSequence& seq) const {
  const EmojiMeta* meta = find(seq);
  if (meta == nullptr) return std::nullopt;
  return meta->category;
}

}  // namespace emojiprobe::emoji
