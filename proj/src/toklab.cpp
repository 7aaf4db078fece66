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

#include "emojiprobe/toklab.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <unicode/utf8.h>

#include "emojiprobe/errors.hpp"
#include "emojiprobe/unicode.hpp"

namespace emojiprobe::toklab {

namespace {

constexpr size_t kNpos = std::numeric_limits<size_t>::max();
constexpr uint32_t kUnbounded = std::numeric_limits<uint32_t>::max();

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CharClass {
  bool negated = false;
  bool letters = false;
  bool numbers = false;
  bool whitespace = false;
  std::u32string literals;

  bool matches(char32_t cp) const {
    bool hit = (letters && unicode::is_letter(cp)) ||
               (numbers && unicode::is_number(cp)) ||
               (whitespace && unicode::is_space(cp)) ||
               literals.find(cp) != std::u32string::npos;
    return negated ? !hit : hit;
  }
};

struct Item {
  CharClass cls;
  uint32_t min = 1;
  uint32_t max = 1;
};

struct Alternative {
  // Literal alternation ('s|'t|...), tried in order; empty when items apply.
  std::vector<std::u32string> literal_alts;
  bool icase = false;
  std::vector<Item> items;
  bool trailing_not_nonspace = false;  // (?!\S)
};

class PatternParser {
 public:
  explicit PatternParser(std::u32string pattern) : p_(std::move(pattern)) {}

  std::vector<Alternative> parse() {
    std::vector<Alternative> alts;
    alts.push_back(parse_alternative());
    while (pos_ < p_.size() && p_[pos_] == U'|') {
      pos_++;
      alts.push_back(parse_alternative());
    }
    if (pos_ != p_.size()) fail("trailing input");
    return alts;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw ParseError("pre-tokenizer pattern: " + why + " at offset " +
                     std::to_string(pos_));
  }

  char32_t peek(size_t ahead = 0) const {
    return pos_ + ahead < p_.size() ? p_[pos_ + ahead] : 0;
  }

  Alternative parse_alternative() {
    Alternative alt;
    if (peek() == U'(' && peek(1) != U'?') {
      parse_literal_group(alt, false);
      return alt;
    }
    if (peek() == U'(' && peek(1) == U'?' && peek(2) == U'i' &&
        peek(3) == U':') {
      pos_ += 1;
      parse_literal_group(alt, true);
      return alt;
    }
    while (pos_ < p_.size() && peek() != U'|') {
      if (peek() == U'(' && peek(1) == U'?' && peek(2) == U'!') {
        pos_ += 3;
        if (peek() != U'\\' || peek(1) != U'S') {
          fail("only the (?!\\S) lookahead is supported");
        }
        pos_ += 2;
        if (peek() != U')') fail("unterminated lookahead");
        pos_++;
        alt.trailing_not_nonspace = true;
        if (pos_ < p_.size() && peek() != U'|') fail("lookahead must be last");
        break;
      }
      Item item;
      item.cls = parse_atom();
      parse_quantifier(item);
      alt.items.push_back(std::move(item));
    }
    if (alt.items.empty() && !alt.trailing_not_nonspace) {
      fail("empty alternative");
    }
    // Pure literal sequences become a literal alternative.
    bool all_single_literals = !alt.trailing_not_nonspace;
    for (const auto& item : alt.items) {
      if (item.min != 1 || item.max != 1 || item.cls.negated ||
          item.cls.letters || item.cls.numbers || item.cls.whitespace ||
          item.cls.literals.size() != 1) {
        all_single_literals = false;
        break;
      }
    }
    if (all_single_literals && !alt.items.empty()) {
      std::u32string lit;
      for (const auto& item : alt.items) lit += item.cls.literals;
      alt.literal_alts.push_back(std::move(lit));
      alt.items.clear();
    }
    return alt;
  }

  void parse_literal_group(Alternative& alt, bool icase) {
    // pos_ at '(' (plain) or at '?' of "(?i:"; normalize to after opener.
    if (peek() == U'(') {
      pos_++;
    }
    if (icase) pos_ += 3;  // "?i:"
    alt.icase = icase;
    std::u32string current;
    while (true) {
      if (pos_ >= p_.size()) fail("unterminated group");
      char32_t c = p_[pos_];
      if (c == U')') {
        pos_++;
        break;
      }
      if (c == U'|') {
        alt.literal_alts.push_back(current);
        current.clear();
        pos_++;
        continue;
      }
      if (c == U'\\') {
        pos_++;
        if (pos_ >= p_.size()) fail("dangling escape");
        current.push_back(p_[pos_]);
        pos_++;
        continue;
      }
      current.push_back(c);
      pos_++;
    }
    alt.literal_alts.push_back(current);
    if (pos_ < p_.size() && peek() != U'|') {
      fail("literal groups must form a whole alternative");
    }
  }

  CharClass parse_atom() {
    CharClass cls;
    char32_t c = peek();
    if (c == U'[') {
      pos_++;
      if (peek() == U'^') {
        cls.negated = true;
        pos_++;
      }
      while (peek() != U']') {
        if (pos_ >= p_.size()) fail("unterminated character class");
        add_class_atom(cls);
      }
      pos_++;
      return cls;
    }
    add_class_atom(cls);
    return cls;
  }

  void add_class_atom(CharClass& cls) {
    char32_t c = peek();
    if (c == U'\\') {
      pos_++;
      char32_t esc = peek();
      switch (esc) {
        case U'p': {
          pos_++;
          if (peek() != U'{') fail("expected '{' after \\p");
          pos_++;
          char32_t prop = peek();
          if (prop == U'L') cls.letters = true;
          else if (prop == U'N') cls.numbers = true;
          else fail("unsupported \\p property");
          pos_++;
          if (peek() != U'}') fail("expected '}' after property");
          pos_++;
          return;
        }
        case U's': cls.whitespace = true; pos_++; return;
        case U'r': cls.literals.push_back(U'\r'); pos_++; return;
        case U'n': cls.literals.push_back(U'\n'); pos_++; return;
        case U't': cls.literals.push_back(U'\t'); pos_++; return;
        default: cls.literals.push_back(esc); pos_++; return;
      }
    }
    cls.literals.push_back(c);
    pos_++;
  }

  void parse_quantifier(Item& item) {
    char32_t c = peek();
    if (c == U'?') {
      item.min = 0;
      item.max = 1;
      pos_++;
    } else if (c == U'+') {
      item.min = 1;
      item.max = kUnbounded;
      pos_++;
    } else if (c == U'*') {
      item.min = 0;
      item.max = kUnbounded;
      pos_++;
    } else if (c == U'{') {
      pos_++;
      item.min = parse_int();
      if (peek() == U',') {
        pos_++;
        item.max = peek() == U'}' ? kUnbounded : parse_int();
      } else {
        item.max = item.min;
      }
      if (peek() != U'}') fail("unterminated quantifier");
      pos_++;
    }
  }

  uint32_t parse_int() {
    uint32_t value = 0;
    bool any = false;
    while (peek() >= U'0' && peek() <= U'9') {
      value = value * 10 + (peek() - U'0');
      pos_++;
      any = true;
    }
    if (!any) fail("expected number");
    return value;
  }

  std::u32string p_;
  size_t pos_ = 0;
};

size_t match_items(const std::vector<Item>& items, bool lookahead,
                   std::u32string_view text, size_t idx, size_t pos) {
  if (idx == items.size()) {
    if (lookahead && pos < text.size() && !unicode::is_space(text[pos])) {
      return kNpos;
    }
    return pos;
  }
  const Item& item = items[idx];
  size_t count = 0;
  while (count < item.max && pos + count < text.size() &&
         item.cls.matches(text[pos + count])) {
    count++;
  }
  while (true) {
    if (count >= item.min) {
      size_t end = match_items(items, lookahead, text, idx + 1, pos + count);
      if (end != kNpos) return end;
    }
    if (count == 0) return kNpos;
    count--;
  }
}

size_t match_alternative(const Alternative& alt, std::u32string_view text,
                         size_t pos) {
  if (!alt.literal_alts.empty()) {
    for (const auto& lit : alt.literal_alts) {
      if (pos + lit.size() > text.size()) continue;
      bool ok = true;
      for (size_t i = 0; i < lit.size(); ++i) {
        char32_t a = text[pos + i];
        char32_t b = lit[i];
        if (alt.icase) {
          a = unicode::to_lower(a);
          b = unicode::to_lower(b);
        }
        if (a != b) {
          ok = false;
          break;
        }
      }
      if (ok) return pos + lit.size();
    }
    return kNpos;
  }
  size_t end = match_items(alt.items, alt.trailing_not_nonspace, text, 0, pos);
  if (end == kNpos || end == pos) return kNpos;
  return end;
}

}  // namespace

struct PreTokenizer::Impl {
  std::vector<Alternative> alternatives;
};

PreTokenizer::PreTokenizer(std::string_view pattern)
    : pattern_(pattern) {
  while (!pattern_.empty() &&
         (pattern_.back() == '\n' || pattern_.back() == '\r')) {
    pattern_.pop_back();
  }
  auto impl = std::make_shared<Impl>();
  impl->alternatives =
      PatternParser(unicode::decode_utf8(pattern_)).parse();
  impl_ = std::move(impl);
}

std::vector<std::u32string> PreTokenizer::split(
    std::u32string_view text) const {
  std::vector<std::u32string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = kNpos;
    for (const auto& alt : impl_->alternatives) {
      end = match_alternative(alt, text, pos);
      if (end != kNpos) break;
    }
    if (end == kNpos) end = pos + 1;  // totality: stray codepoint stands alone
    out.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

const std::string& PreTokenizer::gpt2_pattern() {
  static const std::string kPattern =
      "'s|'t|'re|'ve|'m|'ll|'d| ?\\p{L}+| ?\\p{N}+| ?[^\\s\\p{L}\\p{N}]+|\\s+"
      "(?!\\S)|\\s+";
  return kPattern;
}

const std::array<char32_t, 256>& byte_to_unit() {
  static const std::array<char32_t, 256> kMap = [] {
    std::array<char32_t, 256> map{};
    auto printable = [](int b) {
      return (b >= 0x21 && b <= 0x7E) || (b >= 0xA1 && b <= 0xAC) ||
             (b >= 0xAE && b <= 0xFF);
    };
    int next = 0;
    for (int b = 0; b < 256; ++b) {
      if (printable(b)) {
        map[b] = static_cast<char32_t>(b);
      } else {
        map[b] = static_cast<char32_t>(256 + next);
        next++;
      }
    }
    return map;
  }();
  return kMap;
}

int unit_to_byte(char32_t cp) {
  static const auto kReverse = [] {
    std::array<int, 0x200> rev{};
    rev.fill(-1);
    const auto& fwd = byte_to_unit();
    for (int b = 0; b < 256; ++b) rev[fwd[b]] = b;
    return rev;
  }();
  if (cp >= 0x200) return -1;
  return kReverse[cp];
}

namespace {

// Tokenization must be lossless over arbitrary byte strings, so ill-formed
// UTF-8 bytes are carried through pretokenization as surrogate-escaped
// codepoints (U+DC00 + byte) instead of U+FFFD. Surrogates can never come
// from valid input, so the round trip is exact.
constexpr char32_t kByteEscapeBase = 0xDC00;

std::u32string decode_bytes_preserving(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    int32_t before = i;
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    if (cp < 0) {
      for (int32_t k = before; k < i; ++k) {
        out.push_back(kByteEscapeBase + bytes[k]);
      }
    } else {
      out.push_back(static_cast<char32_t>(cp));
    }
  }
  return out;
}

std::string encode_bytes_preserving(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 4);
  for (char32_t cp : cps) {
    if (cp >= kByteEscapeBase && cp <= kByteEscapeBase + 0xFF) {
      out.push_back(static_cast<char>(cp - kByteEscapeBase));
    } else {
      out += unicode::encode_utf8(cp);
    }
  }
  return out;
}

// Remapped token text -> raw bytes; empty optional when the token contains
// codepoints outside the byte alphabet.
std::optional<std::string> units_to_bytes(const std::string& token) {
  std::string bytes;
  for (char32_t cp : unicode::decode_utf8(token)) {
    int b = unit_to_byte(cp);
    if (b < 0) return std::nullopt;
    bytes.push_back(static_cast<char>(b));
  }
  return bytes;
}

std::string bytes_to_units(std::string_view bytes) {
  std::u32string units;
  units.reserve(bytes.size());
  for (unsigned char b : bytes) units.push_back(byte_to_unit()[b]);
  return unicode::encode_utf8(units);
}

uint64_t pair_key(uint32_t left, uint32_t right) {
  return (static_cast<uint64_t>(left) << 32) | right;
}

}  // namespace

BpeVocab BpeVocab::from_strings(std::string_view vocab_text,
                                std::string_view merges_text,
                                std::string_view pattern,
                                const std::string& origin) {
  BpeVocab vocab;
  if (!pattern.empty()) vocab.pretokenizer_ = PreTokenizer(pattern);

  size_t first_content = vocab_text.find_first_not_of(" \t\r\n");
  if (first_content != std::string_view::npos &&
      vocab_text[first_content] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(vocab_text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(origin + ": vocab JSON: " + e.what());
    }
    vocab.id_to_token_.resize(j.size());
    std::vector<bool> seen(j.size(), false);
    for (const auto& [token, id_value] : j.items()) {
      if (!id_value.is_number_unsigned()) {
        throw ParseError(origin + ": vocab id for token must be a non-negative integer");
      }
      size_t id = id_value.get<size_t>();
      if (id >= vocab.id_to_token_.size() || seen[id]) {
        throw ParseError(origin + ": vocab ids must be dense and unique; bad id " +
                         std::to_string(id));
      }
      seen[id] = true;
      vocab.id_to_token_[id] = token;
    }
  } else {
    size_t start = 0;
    while (start < vocab_text.size()) {
      size_t eol = vocab_text.find('\n', start);
      std::string_view line = eol == std::string_view::npos
                                  ? vocab_text.substr(start)
                                  : vocab_text.substr(start, eol - start);
      start = eol == std::string_view::npos ? vocab_text.size() : eol + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty() && start >= vocab_text.size()) break;  // trailing newline
      vocab.id_to_token_.emplace_back(line);
    }
  }

  vocab.id_to_bytes_.resize(vocab.id_to_token_.size());
  vocab.token_to_id_.reserve(vocab.id_to_token_.size() * 2);
  for (uint32_t id = 0; id < vocab.id_to_token_.size(); ++id) {
    const std::string& token = vocab.id_to_token_[id];
    auto bytes = units_to_bytes(token);
    if (!bytes) {
      throw ParseError(origin + ": vocab token " + std::to_string(id) +
                       " contains codepoints outside the byte alphabet");
    }
    vocab.id_to_bytes_[id] = std::move(*bytes);
    if (!vocab.token_to_id_.emplace(token, id).second) {
      throw ParseError(origin + ": duplicate vocab token at id " +
                       std::to_string(id));
    }
  }

  bool byte_seen[256] = {};
  for (uint32_t id = 0; id < vocab.id_to_bytes_.size(); ++id) {
    if (vocab.id_to_bytes_[id].size() == 1) {
      unsigned char b = static_cast<unsigned char>(vocab.id_to_bytes_[id][0]);
      if (!byte_seen[b]) {
        byte_seen[b] = true;
        vocab.byte_unit_ids_[b] = id;
      }
    }
  }
  for (int b = 0; b < 256; ++b) {
    if (!byte_seen[b]) {
      throw ParseError(origin + ": vocab is missing the byte unit for 0x" +
                       [&] {
                         char buf[8];
                         std::snprintf(buf, sizeof(buf), "%02X", b);
                         return std::string(buf);
                       }());
    }
  }

  // merges
  size_t start = 0;
  size_t lineno = 0;
  uint32_t rank = 0;
  while (start < merges_text.size()) {
    size_t eol = merges_text.find('\n', start);
    std::string_view line = eol == std::string_view::npos
                                ? merges_text.substr(start)
                                : merges_text.substr(start, eol - start);
    start = eol == std::string_view::npos ? merges_text.size() : eol + 1;
    lineno++;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.rfind("#version", 0) == 0) continue;
    size_t space = line.find(' ');
    if (space == std::string_view::npos ||
        line.find(' ', space + 1) != std::string_view::npos) {
      throw ParseError(origin, lineno,
                       "merge line must be exactly 'left right'");
    }
    std::string left(line.substr(0, space));
    std::string right(line.substr(space + 1));
    auto lit = vocab.token_to_id_.find(left);
    auto rit = vocab.token_to_id_.find(right);
    auto cit = vocab.token_to_id_.find(left + right);
    if (lit == vocab.token_to_id_.end() || rit == vocab.token_to_id_.end() ||
        cit == vocab.token_to_id_.end()) {
      throw ParseError(origin, lineno,
                       "merge '" + left + " " + right +
                           "' references a token absent from the vocab");
    }
    uint64_t key = pair_key(lit->second, rit->second);
    if (!vocab.merges_.emplace(key, std::make_pair(rank, cit->second)).second) {
      throw ParseError(origin, lineno,
                       "duplicate merge '" + left + " " + right + "'");
    }
    rank++;
  }
  vocab.n_merges_ = rank;
  return vocab;
}

BpeVocab BpeVocab::load(const std::string& vocab_path,
                        const std::string& merges_path,
                        const std::string& pattern_path) {
  std::string pattern;
  if (!pattern_path.empty()) {
    pattern = read_file(pattern_path);
  } else {
    std::filesystem::path sibling(merges_path);
    sibling.replace_extension(".pattern");
    std::error_code ec;
    if (std::filesystem::exists(sibling, ec)) {
      pattern = read_file(sibling.string());
    } else {
      pattern = PreTokenizer::gpt2_pattern();
    }
  }
  return from_strings(read_file(vocab_path), read_file(merges_path), pattern,
                      vocab_path);
}

std::vector<uint32_t> BpeVocab::encode_pretoken(std::string_view bytes) const {
  std::vector<uint32_t> syms;
  syms.reserve(bytes.size());
  for (unsigned char b : bytes) syms.push_back(byte_unit_ids_[b]);
  while (syms.size() > 1) {
    uint32_t best_rank = std::numeric_limits<uint32_t>::max();
    size_t best_i = kNpos;
    uint32_t best_merged = 0;
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = merges_.find(pair_key(syms[i], syms[i + 1]));
      if (it != merges_.end() && it->second.first < best_rank) {
        best_rank = it->second.first;
        best_i = i;
        best_merged = it->second.second;
      }
    }
    if (best_i == kNpos) break;
    syms[best_i] = best_merged;
    syms.erase(syms.begin() + static_cast<ptrdiff_t>(best_i) + 1);
  }
  return syms;
}

std::vector<uint32_t> BpeVocab::encode(std::string_view text) const {
  std::vector<uint32_t> out;
  std::u32string u32 = decode_bytes_preserving(text);
  for (const auto& pretoken : pretokenizer_.split(u32)) {
    std::string bytes = encode_bytes_preserving(pretoken);
    auto ids = encode_pretoken(bytes);
    out.insert(out.end(), ids.begin(), ids.end());
  }
  return out;
}

std::string BpeVocab::decode(std::span<const uint32_t> ids) const {
  std::string out;
  for (uint32_t id : ids) {
    if (id >= id_to_bytes_.size()) {
      throw InvalidArgument("token id " + std::to_string(id) +
                            " out of range for vocab of size " +
                            std::to_string(id_to_bytes_.size()));
    }
    out += id_to_bytes_[id];
  }
  return out;
}

const std::string& BpeVocab::token_text(uint32_t id) const {
  if (id >= id_to_token_.size()) {
    throw InvalidArgument("token id " + std::to_string(id) + " out of range");
  }
  return id_to_token_[id];
}

TokenizationReport fragmentation_stats(const emoji::EmojiInventory& inventory,
                                       const BpeVocab& vocab,
                                       bool single_char_only) {
  TokenizationReport report;
  for (const auto& meta : inventory.entries()) {
    std::string text;
    if (single_char_only) {
      std::u32string canonical;
      for (char32_t cp : meta.sequence.codepoints()) {
        if (cp != emoji::kVs16) canonical.push_back(cp);
      }
      if (canonical.size() != 1) continue;
      text = unicode::encode_utf8(canonical);
    } else {
      text = meta.sequence.to_utf8();
    }
    FragmentationRow row;
    row.sequence = meta.sequence;
    row.text = text;
    row.token_ids = vocab.encode(text);
    if (row.token_ids.size() > 1) report.n_multi_token++;
    report.per_emoji.push_back(std::move(row));
  }
  report.n_emojis = report.per_emoji.size();
  report.multi_token_fraction =
      report.n_emojis == 0
          ? 0.0
          : static_cast<double>(report.n_multi_token) /
                static_cast<double>(report.n_emojis);
  return report;
}

OverlapRecord overlap(const emoji::EmojiSequence& seq, const std::string& word,
                      const BpeVocab& vocab) {
  OverlapRecord rec;
  rec.sequence = seq;
  rec.word = word;
  rec.emoji_tokens = vocab.encode(seq.to_utf8());
  rec.word_tokens = vocab.encode(word);
  std::set<uint32_t> a(rec.emoji_tokens.begin(), rec.emoji_tokens.end());
  std::set<uint32_t> b(rec.word_tokens.begin(), rec.word_tokens.end());
  std::set<uint32_t> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(inter, inter.begin()));
  size_t union_size = a.size() + b.size() - inter.size();
  rec.jaccard = union_size == 0
                    ? 1.0
                    : static_cast<double>(inter.size()) /
                          static_cast<double>(union_size);
  return rec;
}

}  // namespace emojiprobe::toklab
