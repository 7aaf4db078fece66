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

#ifndef EMOJIPROBE_CORPUS_HPP
#define EMOJIPROBE_CORPUS_HPP

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "emojiprobe/clients.hpp"
#include "emojiprobe/emoji.hpp"
#include "emojiprobe/harness.hpp"
#include "emojiprobe/transform.hpp"

namespace emojiprobe::corpus {

struct CorpusDoc {
  std::string doc_id;
  std::string text;
};

struct EmojiHit {
  std::string doc_id;
  emoji::EmojiSequence sequence;
  std::string context;  // window around the occurrence
  size_t char_offset = 0;

  std::string to_json() const;
  static EmojiHit from_json(const std::string& json_text);
};

// Emojis occurring strictly more than min_count times across the records'
// emoji_text fields, with their counts, most frequent first.
std::vector<std::pair<emoji::EmojiSequence, size_t>> select_frequent_emojis(
    const std::vector<transform::PromptRecord>& prompts, size_t min_count);

enum class CorpusFormat { kJsonl, kPlainLines };

// Streaming reader over record-per-line corpus files. JSONL mode expects a
// "text" field (records without one are skipped and counted); plain mode
// treats each line as one document. doc_ids are "<name>:<line>".
class CorpusReader {
 public:
  CorpusReader(std::istream& in, CorpusFormat format, std::string name);
  // False at end of stream. Undecodable/skipped lines increment skipped().
  bool next(CorpusDoc& doc);
  size_t skipped() const { return skipped_; }

 private:
  std::istream& in_;
  CorpusFormat format_;
  std::string name_;
  size_t lineno_ = 0;
  size_t skipped_ = 0;
};

struct ScanOptions {
  size_t window = 200;  // codepoints each side
  bool dedup = false;   // hash-based duplicate-document skipping
};

struct ScanStats {
  size_t docs_scanned = 0;
  size_t docs_skipped = 0;
  size_t docs_with_hits = 0;
  size_t hits = 0;
  size_t duplicates_skipped = 0;
};

// Streams documents, emitting one hit per target-emoji occurrence in input
// order. Memory stays bounded by the document and window size. Targets
// match VS16-insensitively (canonical keys).
ScanStats scan_corpus(CorpusReader& reader,
                      const std::unordered_set<std::string>& target_keys,
                      const ScanOptions& options,
                      const std::function<void(const EmojiHit&)>& sink);

std::unordered_set<std::string> target_keys_from(
    const std::vector<emoji::EmojiSequence>& targets);

enum class ToxicityLabel { kToxic, kBenign, kInvalid };
std::string to_string(ToxicityLabel label);

struct LabeledHit {
  EmojiHit hit;
  ToxicityLabel label = ToxicityLabel::kInvalid;
  std::string judge_output;

  std::string to_json() const;
  static LabeledHit from_json(const std::string& json_text);
};

// Instruction placeholders: {context} and {emoji}. Unparseable verdicts are
// invalid and excluded from ratios.
LabeledHit label_toxicity(const EmojiHit& hit, ChatClient& judge,
                          const std::string& instruction,
                          const harness::RetryPolicy& policy = {});

struct ToxicityRatioRow {
  emoji::EmojiSequence sequence;
  size_t n_contexts = 0;
  size_t n_toxic = 0;
  double ratio = 0.0;
  std::string bucket;  // ">=0.5" | "[0.3,0.5)" | "[0.1,0.3)" | "<0.1"
};

std::string bucket_of(double ratio);

struct RatioTable {
  std::vector<ToxicityRatioRow> rows;  // sorted by ratio descending
  size_t n_valid = 0;
  size_t n_toxic = 0;
  size_t n_invalid = 0;
  double overall_fraction = 0.0;  // toxic / valid
};

RatioTable ratio_table(const std::vector<LabeledHit>& labeled);

}  // namespace emojiprobe::corpus

#endif  // EMOJIPROBE_CORPUS_HPP
