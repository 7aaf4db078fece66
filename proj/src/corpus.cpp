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

#include "emojiprobe/corpus.hpp"

#include <algorithm>
#include <istream>
#include <map>

#include <nlohmann/json.hpp>

#include "emojiprobe/errors.hpp"
#include "emojiprobe/unicode.hpp"

namespace emojiprobe::corpus {

using json = nlohmann::json;

std::string EmojiHit::to_json() const {
  return json{{"doc_id", doc_id},
              {"emoji", sequence.to_utf8()},
              {"context", context},
              {"char_offset", char_offset}}
      .dump();
}

EmojiHit EmojiHit::from_json(const std::string& json_text) {
  try {
    json j = json::parse(json_text);
    EmojiHit hit;
    hit.doc_id = j.at("doc_id").get<std::string>();
    hit.sequence =
        emoji::EmojiSequence::from_utf8(j.at("emoji").get<std::string>());
    hit.context = j.at("context").get<std::string>();
    hit.char_offset = j.at("char_offset").get<size_t>();
    return hit;
  } catch (const json::exception& e) {
    throw ParseError(std::string("emoji hit record: ") + e.what());
  }
}

std::vector<std::pair<emoji::EmojiSequence, size_t>> select_frequent_emojis(
    const std::vector<transform::PromptRecord>& prompts, size_t min_count) {
  if (prompts.empty()) {
    return {};
  }
  std::map<std::string, std::pair<emoji::EmojiSequence, size_t>> counts;
  for (const auto& rec : prompts) {
    for (const auto& span :
         emoji::parse_emoji_spans(std::string_view(rec.emoji_text))) {
      auto [it, inserted] = counts.try_emplace(
          span.sequence.canonical_key(), span.sequence, 0);
      it->second.second++;
    }
  }
  std::vector<std::pair<emoji::EmojiSequence, size_t>> out;
  for (auto& [key, entry] : counts) {
    if (entry.second > min_count) out.push_back(std::move(entry));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return out;
}

CorpusReader::CorpusReader(std::istream& in, CorpusFormat format,
                           std::string name)
    : in_(in), format_(format), name_(std::move(name)) {}

bool CorpusReader::next(CorpusDoc& doc) {
  std::string line;
  while (std::getline(in_, line)) {
    lineno_++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    doc.doc_id = name_ + ":" + std::to_string(lineno_);
    if (format_ == CorpusFormat::kPlainLines) {
      doc.text = std::move(line);
      return true;
    }
    try {
      json j = json::parse(line);
      if (!j.is_object() || !j.contains("text") || !j.at("text").is_string()) {
        skipped_++;
        continue;
      }
      if (j.contains("doc_id") && j.at("doc_id").is_string()) {
        doc.doc_id = j.at("doc_id").get<std::string>();
      }
      doc.text = j.at("text").get<std::string>();
      return true;
    } catch (const json::exception&) {
      skipped_++;
      continue;
    }
  }
  return false;
}

std::unordered_set<std::string> target_keys_from(
    const std::vector<emoji::EmojiSequence>& targets) {
  std::unordered_set<std::string> keys;
  for (const auto& seq : targets) keys.insert(seq.canonical_key());
  return keys;
}

ScanStats scan_corpus(CorpusReader& reader,
                      const std::unordered_set<std::string>& target_keys,
                      const ScanOptions& options,
                      const std::function<void(const EmojiHit&)>& sink) {
  ScanStats stats;
  std::unordered_set<size_t> seen_hashes;
  CorpusDoc doc;
  while (reader.next(doc)) {
    if (options.dedup) {
      size_t h = std::hash<std::string>{}(doc.text);
      if (!seen_hashes.insert(h).second) {
        stats.duplicates_skipped++;
        continue;
      }
    }
    stats.docs_scanned++;
    std::u32string text =
        unicode::decode_utf8(unicode::nfc(doc.text));
    bool any = false;
    for (const auto& span : emoji::parse_emoji_spans(text)) {
      if (!target_keys.count(span.sequence.canonical_key())) continue;
      any = true;
      stats.hits++;
      EmojiHit hit;
      hit.doc_id = doc.doc_id;
      hit.sequence = span.sequence;
      size_t ctx_begin =
          span.begin > options.window ? span.begin - options.window : 0;
      size_t ctx_end = std::min(text.size(), span.end + options.window);
      hit.context =
          unicode::encode_utf8(text.substr(ctx_begin, ctx_end - ctx_begin));
      hit.char_offset = span.begin;
      sink(hit);
    }
    if (any) stats.docs_with_hits++;
  }
  stats.docs_skipped = reader.skipped();
  return stats;
}

std::string to_string(ToxicityLabel label) {
  switch (label) {
    case ToxicityLabel::kToxic: return "toxic";
    case ToxicityLabel::kBenign: return "benign";
    case ToxicityLabel::kInvalid: return "invalid";
  }
  return "invalid";
}

std::string LabeledHit::to_json() const {
  json j = json::parse(hit.to_json());
  j["label"] = corpus::to_string(label);
  j["judge_output"] = judge_output;
  return j.dump();
}

LabeledHit LabeledHit::from_json(const std::string& json_text) {
  LabeledHit labeled;
  labeled.hit = EmojiHit::from_json(json_text);
  try {
    json j = json::parse(json_text);
    std::string label = j.at("label").get<std::string>();
    if (label == "toxic") labeled.label = ToxicityLabel::kToxic;
    else if (label == "benign") labeled.label = ToxicityLabel::kBenign;
    else labeled.label = ToxicityLabel::kInvalid;
    labeled.judge_output = j.value("judge_output", "");
  } catch (const json::exception& e) {
    throw ParseError(std::string("labeled hit record: ") + e.what());
  }
  return labeled;
}

namespace {

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

}  // namespace

LabeledHit label_toxicity(const EmojiHit& hit, ChatClient& judge,
                          const std::string& instruction,
                          const harness::RetryPolicy& policy) {
  if (instruction.empty()) {
    throw ConfigError("toxicity labeling instruction must be configured");
  }
  std::string prompt = replace_all(
      replace_all(instruction, "{context}", hit.context), "{emoji}",
      hit.sequence.to_utf8());
  ChatOptions options;
  options.temperature = 0.0;

  LabeledHit labeled;
  labeled.hit = hit;
  harness::CallResult result =
      harness::call_with_retry(judge, {{"user", prompt}}, options, policy);
  labeled.judge_output = result.response.text;
  switch (harness::parse_perception_verdict(result.response.text)) {
    case harness::PerceptionVerdict::kHarmful:
      labeled.label = ToxicityLabel::kToxic;
      break;
    case harness::PerceptionVerdict::kBenign:
      labeled.label = ToxicityLabel::kBenign;
      break;
    case harness::PerceptionVerdict::kInvalid:
      labeled.label = ToxicityLabel::kInvalid;
      break;
  }
  return labeled;
}

std::string bucket_of(double ratio) {
  if (ratio >= 0.5) return ">=0.5";
  if (ratio >= 0.3) return "[0.3,0.5)";
  if (ratio >= 0.1) return "[0.1,0.3)";
  return "<0.1";
}

RatioTable ratio_table(const std::vector<LabeledHit>& labeled) {
  if (labeled.empty()) {
    throw InvalidArgument("ratio_table requires at least one labeled hit");
  }
  RatioTable table;
  std::map<std::string, ToxicityRatioRow> rows;
  for (const auto& item : labeled) {
    if (item.label == ToxicityLabel::kInvalid) {
      table.n_invalid++;
      continue;
    }
    auto [it, inserted] =
        rows.try_emplace(item.hit.sequence.canonical_key());
    if (inserted) it->second.sequence = item.hit.sequence;
    it->second.n_contexts++;
    table.n_valid++;
    if (item.label == ToxicityLabel::kToxic) {
      it->second.n_toxic++;
      table.n_toxic++;
    }
  }
  for (auto& [key, row] : rows) {
    row.ratio = row.n_contexts == 0
                    ? 0.0
                    : static_cast<double>(row.n_toxic) /
                          static_cast<double>(row.n_contexts);
    row.bucket = bucket_of(row.ratio);
    table.rows.push_back(std::move(row));
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const ToxicityRatioRow& a, const ToxicityRatioRow& b) {
                     if (a.ratio != b.ratio) return a.ratio > b.ratio;
                     return a.n_contexts > b.n_contexts;
                   });
  table.overall_fraction =
      table.n_valid == 0 ? 0.0
                         : static_cast<double>(table.n_toxic) /
                               static_cast<double>(table.n_valid);
  return table;
}

}  // namespace emojiprobe::corpus
