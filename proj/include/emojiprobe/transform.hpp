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

#ifndef EMOJIPROBE_TRANSFORM_HPP
#define EMOJIPROBE_TRANSFORM_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emojiprobe/clients.hpp"
#include "emojiprobe/emoji.hpp"

namespace emojiprobe::transform {

struct LexiconEntry {
  std::string term;  // lowercase, NFC, internal whitespace collapsed
  std::vector<emoji::EmojiSequence> emojis;
  std::string language;
};

// Loaded from a UTF-8 file, one entry per line:
//   <term>\t<emoji sequence(s) separated by '|'>\t<language>
// '#' lines are comments. Terms must contain no emoji; emoji sequences must
// validate against the emoji grammar.
class Lexicon {
 public:
  static Lexicon load(const std::string& path);
  static Lexicon from_string(std::string_view text,
                             const std::string& origin = "<memory>");
  static Lexicon from_entries(std::vector<LexiconEntry> entries);

  const std::vector<LexiconEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  // canonical emoji key -> term, for reverse translation.
  std::map<std::string, std::string> reverse_map() const;

 private:
  std::vector<LexiconEntry> entries_;
};

enum class CamouflageRole { kRiddle, kFiction, kChallenge };

std::string to_string(CamouflageRole role);
CamouflageRole camouflage_role_from_string(std::string_view name);

struct CamouflageSet {
  std::string name;
  CamouflageRole role = CamouflageRole::kRiddle;
  std::vector<emoji::EmojiSequence> emojis;  // never empty

  static CamouflageSet make(std::string name, CamouflageRole role,
                            std::vector<emoji::EmojiSequence> emojis);
};

// File format: <name>\t<role>\t<emoji sequence(s) separated by '|'> per line.
std::vector<CamouflageSet> load_camouflage_sets(const std::string& path);
std::vector<CamouflageSet> camouflage_sets_from_string(
    std::string_view text, const std::string& origin = "<memory>");

enum class InsertPosition { kPrefix, kSuffix };

struct Substitution {
  std::string term;
  size_t begin = 0;  // codepoint span in raw_text
  size_t end = 0;
  std::vector<emoji::EmojiSequence> emojis;
  // Codepoint span of the replacement inside emoji_text. Absent after
  // transformations that invalidate positions (translation).
  std::optional<std::pair<size_t, size_t>> emoji_span;
};

struct CamouflageApplication {
  std::string set_name;
  std::vector<emoji::EmojiSequence> emojis;
  InsertPosition position = InsertPosition::kPrefix;
};

struct PromptRecord {
  std::string id;
  std::string language = "en";
  std::string raw_text;    // NFC
  std::string emoji_text;  // NFC
  std::vector<Substitution> substitutions;
  std::optional<CamouflageApplication> camouflage;
  std::vector<std::string> lineage;

  std::string to_json() const;
  static PromptRecord from_json(const std::string& json_text);
};

enum class ReviewStatus { kPending, kApproved, kRevised, kFailed };
std::string to_string(ReviewStatus status);
ReviewStatus review_status_from_string(std::string_view name);

struct ReviewQueueItem {
  PromptRecord record;
  ReviewStatus status = ReviewStatus::kPending;
  std::string reviewer_note;

  std::string to_json() const;
  static ReviewQueueItem from_json(const std::string& json_text);
};

// Append-only review queue: later lines supersede earlier ones per record
// id; the only legal transitions are pending->approved and pending->revised.
void append_review_item(const std::string& path, const ReviewQueueItem& item);
std::vector<ReviewQueueItem> load_review_queue(const std::string& path);

// Replaces every lexicon term occurring in `text` (case-insensitive, word
// boundaries, longest match first, then leftmost) with its emoji sequences.
// Non-matching text is preserved byte-identically; the input is NFC
// normalized first.
PromptRecord substitute_sensitive(const std::string& text,
                                  const Lexicon& lexicon);

// Inserts the camouflage emojis at the prefix (default) or suffix, separated
// from the prompt by a single space. A record may carry camouflage only once.
PromptRecord add_camouflage(const PromptRecord& rec, const CamouflageSet& set,
                            InsertPosition position = InsertPosition::kPrefix);

// Reverse-translates every emoji span back to words: substitution spans
// restore their recorded terms, all other spans resolve through
// reverse_lexicon. Unresolvable sequences are an error naming the offenders.
std::string ablate_to_words(
    const PromptRecord& rec,
    const std::map<std::string, std::string>& reverse_lexicon);

// Removes every emoji span; whitespace runs created by a removal collapse to
// a single space (or vanish at the text boundary).
std::string ablate_remove(const PromptRecord& rec);
std::string remove_emoji_spans(const std::string& text);

// "w/o s.e.": substituted sensitive words are restored while camouflage
// emojis stay in place.
PromptRecord ablate_substitution_only(const PromptRecord& rec);

// "w/o d.e.": the camouflage emojis are stripped while substitutions stay.
// Identity for records without camouflage.
PromptRecord ablate_camouflage_only(const PromptRecord& rec);

// Substitution plus one camouflage insertion over an existing jailbreak
// template; every byte outside those edits is preserved.
PromptRecord enhance_jailbreak(const std::string& template_text,
                               const Lexicon& lexicon,
                               const CamouflageSet& camouflage);

// Translates the surrounding text while requiring the multiset of emoji
// spans to survive unchanged; loss is an integrity error. Substitution
// positions are invalidated by translation.
PromptRecord translate_preserving_emoji(const PromptRecord& rec,
                                        TranslationClient& translator,
                                        const std::string& target_lang);

struct CraftOutcome {
  bool failed = false;
  std::string failure_reason;
  std::string warning;
  ReviewQueueItem item;  // pending unless failed
};

// Drives an external model to rewrite a raw request with emojis and wraps
// the result as a pending review item. Substitutions are reconstructed by
// diffing emoji spans between input and output.
CraftOutcome craft_with_llm(const std::string& raw, ChatClient& model,
                            const std::string& instruction,
                            const std::vector<std::string>& refusal_keywords);

// Whitespace-normalized comparison helper: runs collapse to single spaces,
// ends trimmed.
std::string collapse_whitespace(const std::string& text);

}  // namespace emojiprobe::transform

#endif  // EMOJIPROBE_TRANSFORM_HPP
