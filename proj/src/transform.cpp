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

#include "emojiprobe/transform.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emojiprobe/errors.hpp"
#include "emojiprobe/unicode.hpp"

namespace emojiprobe::transform {

using emoji::EmojiSequence;
using emoji::EmojiSpan;
using json = nlohmann::json;

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

void for_each_line(std::string_view text,
                   const std::function<void(size_t, std::string_view)>& fn) {
  size_t lineno = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t eol = text.find('\n', start);
    std::string_view line = eol == std::string_view::npos
                                ? text.substr(start)
                                : text.substr(start, eol - start);
    start = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    lineno++;
    if (line.empty() || line.front() == '#') continue;
    fn(lineno, line);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<EmojiSequence> parse_emoji_list(std::string_view field,
                                            const std::string& origin,
                                            size_t lineno) {
  std::vector<EmojiSequence> out;
  for (const std::string& part : split(field, '|')) {
    if (part.empty()) continue;
    try {
      out.push_back(EmojiSequence::from_utf8(unicode::nfc(part)));
    } catch (const InvalidArgument& e) {
      throw ParseError(origin, lineno, e.what());
    }
  }
  if (out.empty()) {
    throw ParseError(origin, lineno, "emoji list must be non-empty");
  }
  return out;
}

// Collapses internal whitespace runs to single spaces without trimming
// semantics beyond the ends.
std::u32string canonicalize_term(std::u32string_view term) {
  std::u32string out;
  bool in_space = false;
  for (char32_t cp : term) {
    if (unicode::is_space(cp)) {
      in_space = !out.empty();
      continue;
    }
    if (in_space) out.push_back(U' ');
    in_space = false;
    out.push_back(unicode::to_lower(cp));
  }
  return out;
}

std::u32string concat_codepoints(const std::vector<EmojiSequence>& seqs) {
  std::u32string out;
  for (const auto& s : seqs) out += s.codepoints();
  return out;
}

}  // namespace

Lexicon Lexicon::from_string(std::string_view text, const std::string& origin) {
  std::vector<LexiconEntry> entries;
  for_each_line(text, [&](size_t lineno, std::string_view line) {
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(origin, lineno,
                       "expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()));
    }
    LexiconEntry entry;
    std::u32string term =
        canonicalize_term(unicode::decode_utf8(unicode::nfc(fields[0])));
    if (term.empty()) throw ParseError(origin, lineno, "term must be non-empty");
    entry.term = unicode::encode_utf8(term);
    if (!emoji::parse_emoji_spans(entry.term).empty()) {
      throw ParseError(origin, lineno, "term must contain no emoji: '" +
                                           entry.term + "'");
    }
    entry.emojis = parse_emoji_list(fields[1], origin, lineno);
    entry.language = fields[2];
    entries.push_back(std::move(entry));
  });
  return from_entries(std::move(entries));
}

Lexicon Lexicon::from_entries(std::vector<LexiconEntry> entries) {
  Lexicon lex;
  lex.entries_ = std::move(entries);
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  return from_string(read_file(path), path);
}

std::map<std::string, std::string> Lexicon::reverse_map() const {
  std::map<std::string, std::string> out;
  for (const auto& entry : entries_) {
    for (const auto& seq : entry.emojis) {
      out.emplace(seq.canonical_key(), entry.term);
    }
  }
  return out;
}

std::string to_string(CamouflageRole role) {
  switch (role) {
    case CamouflageRole::kRiddle: return "riddle";
    case CamouflageRole::kFiction: return "fiction";
    case CamouflageRole::kChallenge: return "challenge";
  }
  return "riddle";
}

CamouflageRole camouflage_role_from_string(std::string_view name) {
  if (name == "riddle") return CamouflageRole::kRiddle;
  if (name == "fiction") return CamouflageRole::kFiction;
  if (name == "challenge") return CamouflageRole::kChallenge;
  throw InvalidArgument("unknown camouflage role '" + std::string(name) +
                        "'; expected riddle, fiction or challenge");
}

CamouflageSet CamouflageSet::make(std::string name, CamouflageRole role,
                                  std::vector<EmojiSequence> emojis) {
  if (emojis.empty()) {
    throw InvalidArgument("camouflage set '" + name +
                          "' must have a non-empty emoji list");
  }
  CamouflageSet set;
  set.name = std::move(name);
  set.role = role;
  set.emojis = std::move(emojis);
  return set;
}

std::vector<CamouflageSet> camouflage_sets_from_string(
    std::string_view text, const std::string& origin) {
  std::vector<CamouflageSet> sets;
  for_each_line(text, [&](size_t lineno, std::string_view line) {
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(origin, lineno,
                       "expected 3 tab-separated fields, got " +
                           std::to_string(fields.size()));
    }
    CamouflageRole role;
    try {
      role = camouflage_role_from_string(fields[1]);
    } catch (const InvalidArgument& e) {
      throw ParseError(origin, lineno, e.what());
    }
    sets.push_back(CamouflageSet::make(
        fields[0], role, parse_emoji_list(fields[2], origin, lineno)));
  });
  return sets;
}

std::vector<CamouflageSet> load_camouflage_sets(const std::string& path) {
  return camouflage_sets_from_string(read_file(path), path);
}

// --- JSON (de)serialization --------------------------------------------------

namespace {

json seq_list_to_json(const std::vector<EmojiSequence>& seqs) {
  json arr = json::array();
  for (const auto& s : seqs) arr.push_back(s.to_utf8());
  return arr;
}

std::vector<EmojiSequence> seq_list_from_json(const json& arr) {
  std::vector<EmojiSequence> out;
  for (const auto& item : arr) {
    out.push_back(EmojiSequence::from_utf8(item.get<std::string>()));
  }
  return out;
}

json record_to_json(const PromptRecord& rec) {
  json subs = json::array();
  for (const auto& s : rec.substitutions) {
    json item = {{"term", s.term},
                 {"span", {s.begin, s.end}},
                 {"emojis", seq_list_to_json(s.emojis)}};
    if (s.emoji_span) {
      item["emoji_span"] = {s.emoji_span->first, s.emoji_span->second};
    } else {
      item["emoji_span"] = nullptr;
    }
    subs.push_back(std::move(item));
  }
  json j = {{"id", rec.id},
            {"language", rec.language},
            {"raw_text", rec.raw_text},
            {"emoji_text", rec.emoji_text},
            {"substitutions", std::move(subs)},
            {"lineage", rec.lineage}};
  if (rec.camouflage) {
    j["camouflage"] = {
        {"set", rec.camouflage->set_name},
        {"emojis", seq_list_to_json(rec.camouflage->emojis)},
        {"position",
         rec.camouflage->position == InsertPosition::kPrefix ? "prefix"
                                                             : "suffix"}};
  } else {
    j["camouflage"] = nullptr;
  }
  return j;
}

PromptRecord record_from_json(const json& j) {
  PromptRecord rec;
  rec.id = j.value("id", "");
  rec.language = j.value("language", "en");
  rec.raw_text = j.at("raw_text").get<std::string>();
  rec.emoji_text = j.at("emoji_text").get<std::string>();
  if (j.contains("substitutions")) {
    for (const auto& item : j.at("substitutions")) {
      Substitution s;
      s.term = item.at("term").get<std::string>();
      s.begin = item.at("span").at(0).get<size_t>();
      s.end = item.at("span").at(1).get<size_t>();
      s.emojis = seq_list_from_json(item.at("emojis"));
      if (item.contains("emoji_span") && !item.at("emoji_span").is_null()) {
        s.emoji_span = {item.at("emoji_span").at(0).get<size_t>(),
                        item.at("emoji_span").at(1).get<size_t>()};
      }
      rec.substitutions.push_back(std::move(s));
    }
  }
  if (j.contains("camouflage") && !j.at("camouflage").is_null()) {
    CamouflageApplication camo;
    camo.set_name = j.at("camouflage").at("set").get<std::string>();
    camo.emojis = seq_list_from_json(j.at("camouflage").at("emojis"));
    camo.position =
        j.at("camouflage").at("position").get<std::string>() == "suffix"
            ? InsertPosition::kSuffix
            : InsertPosition::kPrefix;
    rec.camouflage = std::move(camo);
  }
  if (j.contains("lineage")) {
    rec.lineage = j.at("lineage").get<std::vector<std::string>>();
  }
  return rec;
}

}  // namespace

std::string PromptRecord::to_json() const { return record_to_json(*this).dump(); }

PromptRecord PromptRecord::from_json(const std::string& json_text) {
  try {
    return record_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ParseError(std::string("prompt record: ") + e.what());
  }
}

std::string to_string(ReviewStatus status) {
  switch (status) {
    case ReviewStatus::kPending: return "pending";
    case ReviewStatus::kApproved: return "approved";
    case ReviewStatus::kRevised: return "revised";
    case ReviewStatus::kFailed: return "failed";
  }
  return "pending";
}

ReviewStatus review_status_from_string(std::string_view name) {
  if (name == "pending") return ReviewStatus::kPending;
  if (name == "approved") return ReviewStatus::kApproved;
  if (name == "revised") return ReviewStatus::kRevised;
  if (name == "failed") return ReviewStatus::kFailed;
  throw InvalidArgument("unknown review status '" + std::string(name) + "'");
}

std::string ReviewQueueItem::to_json() const {
  json j = record_to_json(record);
  return json{{"record", std::move(j)},
              {"status", transform::to_string(status)},
              {"reviewer_note", reviewer_note}}
      .dump();
}

ReviewQueueItem ReviewQueueItem::from_json(const std::string& json_text) {
  try {
    json j = json::parse(json_text);
    ReviewQueueItem item;
    item.record = record_from_json(j.at("record"));
    item.status = review_status_from_string(j.at("status").get<std::string>());
    item.reviewer_note = j.value("reviewer_note", "");
    return item;
  } catch (const json::exception& e) {
    throw ParseError(std::string("review queue item: ") + e.what());
  }
}

void append_review_item(const std::string& path, const ReviewQueueItem& item) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot open review queue for append: " + path);
  out << item.to_json() << "\n";
}

std::vector<ReviewQueueItem> load_review_queue(const std::string& path) {
  std::string text = read_file(path);
  std::map<std::string, size_t> latest;
  std::vector<ReviewQueueItem> items;
  size_t lineno = 0;
  size_t start = 0;
  while (start < text.size()) {
    size_t eol = text.find('\n', start);
    std::string line = eol == std::string::npos
                           ? text.substr(start)
                           : text.substr(start, eol - start);
    start = eol == std::string::npos ? text.size() : eol + 1;
    lineno++;
    if (line.empty()) continue;
    ReviewQueueItem item = ReviewQueueItem::from_json(line);
    auto it = latest.find(item.record.id);
    if (it == latest.end()) {
      latest.emplace(item.record.id, items.size());
      items.push_back(std::move(item));
      continue;
    }
    ReviewQueueItem& prev = items[it->second];
    bool legal = prev.status == ReviewStatus::kPending &&
                 (item.status == ReviewStatus::kApproved ||
                  item.status == ReviewStatus::kRevised);
    if (!legal) {
      throw StateError(path + ":" + std::to_string(lineno) +
                       ": illegal review transition " +
                       transform::to_string(prev.status) + " -> " +
                       transform::to_string(item.status) + " for id '" +
                       item.record.id + "'");
    }
    prev = std::move(item);
  }
  return items;
}

// --- substitution -------------------------------------------------------------

PromptRecord substitute_sensitive(const std::string& text,
                                  const Lexicon& lexicon) {
  if (text.empty()) throw InvalidArgument("text must be non-empty");
  if (lexicon.empty()) throw InvalidArgument("lexicon must be non-empty");

  std::u32string raw = unicode::decode_utf8(unicode::nfc(text));
  std::u32string lowered = unicode::to_lower(raw);

  // Longest term first; ties resolved by lexicon order.
  std::vector<size_t> order(lexicon.entries().size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::u32string> terms;
  terms.reserve(order.size());
  for (const auto& e : lexicon.entries()) {
    terms.push_back(unicode::decode_utf8(e.term));
  }
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return terms[a].size() > terms[b].size();
  });

  const size_t n = raw.size();
  auto match_at = [&](const std::u32string& term, size_t pos) -> size_t {
    size_t i = pos;
    for (size_t ti = 0; ti < term.size(); ++ti) {
      if (term[ti] == U' ') {
        if (i >= n || !unicode::is_space(lowered[i])) return 0;
        while (i < n && unicode::is_space(lowered[i])) i++;
      } else {
        if (i >= n || lowered[i] != term[ti]) return 0;
        i++;
      }
    }
    if (unicode::is_word_char(term.front()) && pos > 0 &&
        unicode::is_word_char(lowered[pos - 1])) {
      return 0;
    }
    if (unicode::is_word_char(term.back()) && i < n &&
        unicode::is_word_char(lowered[i])) {
      return 0;
    }
    return i;
  };

  PromptRecord rec;
  rec.raw_text = unicode::encode_utf8(raw);

  std::u32string out;
  size_t pos = 0;
  while (pos < n) {
    size_t matched_end = 0;
    size_t matched_entry = 0;
    for (size_t idx : order) {
      size_t end = match_at(terms[idx], pos);
      if (end != 0) {
        matched_end = end;
        matched_entry = idx;
        break;
      }
    }
    if (matched_end == 0) {
      out.push_back(raw[pos]);
      pos++;
      continue;
    }
    const LexiconEntry& entry = lexicon.entries()[matched_entry];
    Substitution sub;
    sub.term = entry.term;
    sub.begin = pos;
    sub.end = matched_end;
    sub.emojis = entry.emojis;
    std::u32string replacement = concat_codepoints(entry.emojis);
    sub.emoji_span = {out.size(), out.size() + replacement.size()};
    out += replacement;
    rec.substitutions.push_back(std::move(sub));
    pos = matched_end;
  }

  rec.emoji_text = unicode::encode_utf8(out);
  if (!rec.substitutions.empty()) rec.lineage.push_back("substitute");
  return rec;
}

// --- camouflage ---------------------------------------------------------------

PromptRecord add_camouflage(const PromptRecord& rec, const CamouflageSet& set,
                            InsertPosition position) {
  if (rec.camouflage) {
    throw StateError("record '" + rec.id + "' already carries camouflage '" +
                     rec.camouflage->set_name + "'");
  }
  if (set.emojis.empty()) {
    throw InvalidArgument("camouflage set '" + set.name +
                          "' has an empty emoji list");
  }
  PromptRecord out = rec;
  std::u32string camo = concat_codepoints(set.emojis);
  std::u32string body = unicode::decode_utf8(rec.emoji_text);
  if (position == InsertPosition::kPrefix) {
    size_t shift = camo.size() + 1;
    for (auto& sub : out.substitutions) {
      if (sub.emoji_span) {
        sub.emoji_span = {sub.emoji_span->first + shift,
                          sub.emoji_span->second + shift};
      }
    }
    out.emoji_text = unicode::encode_utf8(camo + U" " + body);
  } else {
    out.emoji_text = unicode::encode_utf8(body + U" " + camo);
  }
  out.camouflage =
      CamouflageApplication{set.name, set.emojis, position};
  out.lineage.push_back("camouflage:" + set.name);
  return out;
}

// --- ablations ----------------------------------------------------------------

namespace {

// Spans of the record's substitution groups inside emoji_text. Requires
// position data; translated records no longer carry it.
std::vector<std::pair<size_t, size_t>> substitution_spans(
    const PromptRecord& rec) {
  std::vector<std::pair<size_t, size_t>> spans;
  for (const auto& sub : rec.substitutions) {
    if (!sub.emoji_span) {
      throw StateError(
          "record '" + rec.id +
          "' has no substitution position data (translated or hand-edited); "
          "ablation requires positions");
    }
    spans.push_back(*sub.emoji_span);
  }
  return spans;
}

bool ends_with_word_char(const std::u32string& s) {
  return !s.empty() && unicode::is_word_char(s.back());
}

}  // namespace

std::string ablate_to_words(
    const PromptRecord& rec,
    const std::map<std::string, std::string>& reverse_lexicon) {
  std::u32string text = unicode::decode_utf8(rec.emoji_text);
  auto spans = emoji::parse_emoji_spans(text);
  auto sub_spans = substitution_spans(rec);

  std::vector<std::string> unresolved;
  std::u32string out;
  size_t pos = 0;
  size_t si = 0;
  auto emit_word = [&](const std::string& word, size_t span_begin) {
    // Keep replacements readable when two spans sit flush against each
    // other or against a word: "💣💥" -> "bomb collision".
    if (ends_with_word_char(out) && span_begin == pos) out.push_back(U' ');
    out += unicode::decode_utf8(word);
  };

  for (size_t k = 0; k < spans.size(); ++k) {
    const EmojiSpan& span = spans[k];
    out += text.substr(pos, span.begin - pos);
    // A substitution group may cover several adjacent spans.
    if (si < sub_spans.size() && span.begin == sub_spans[si].first) {
      emit_word(rec.substitutions[si].term, span.begin);
      size_t group_end = sub_spans[si].second;
      pos = group_end;
      while (k + 1 < spans.size() && spans[k + 1].begin < group_end) k++;
      si++;
      continue;
    }
    auto it = reverse_lexicon.find(span.sequence.canonical_key());
    if (it == reverse_lexicon.end()) {
      unresolved.push_back(span.sequence.to_utf8());
      pos = span.end;
      continue;
    }
    emit_word(it->second, span.begin);
    pos = span.end;
  }
  out += text.substr(pos);

  if (!unresolved.empty()) {
    std::string list;
    for (const auto& s : unresolved) {
      if (!list.empty()) list += ", ";
      list += s;
    }
    throw UnresolvedEmojiError("cannot reverse-translate emoji sequence(s): " +
                               list);
  }
  return unicode::encode_utf8(out);
}

std::string remove_emoji_spans(const std::string& text) {
  std::u32string u32 = unicode::decode_utf8(unicode::nfc(text));
  auto spans = emoji::parse_emoji_spans(u32);
  if (spans.empty()) return unicode::encode_utf8(u32);

  std::u32string out;
  size_t pos = 0;
  for (const auto& span : spans) {
    out += u32.substr(pos, span.begin - pos);
    pos = span.end;
    // Collapse whitespace that the removal just made adjacent.
    if (pos < u32.size() && unicode::is_space(u32[pos]) &&
        (out.empty() || unicode::is_space(out.back()))) {
      while (pos < u32.size() && unicode::is_space(u32[pos])) pos++;
    }
  }
  out += u32.substr(pos);
  if (spans.back().end == u32.size()) {
    while (!out.empty() && unicode::is_space(out.back())) out.pop_back();
  }
  return unicode::encode_utf8(out);
}

std::string ablate_remove(const PromptRecord& rec) {
  return remove_emoji_spans(rec.emoji_text);
}

PromptRecord ablate_substitution_only(const PromptRecord& rec) {
  auto sub_spans = substitution_spans(rec);
  for (const auto& sub : rec.substitutions) {
    if (sub.term.empty()) {
      throw UnresolvedEmojiError(
          "record '" + rec.id +
          "' has a substitution without a recorded term; cannot restore");
    }
  }
  std::u32string text = unicode::decode_utf8(rec.emoji_text);
  std::u32string out;
  size_t pos = 0;
  for (size_t i = 0; i < sub_spans.size(); ++i) {
    out += text.substr(pos, sub_spans[i].first - pos);
    out += unicode::decode_utf8(rec.substitutions[i].term);
    pos = sub_spans[i].second;
  }
  out += text.substr(pos);

  PromptRecord result = rec;
  result.emoji_text = unicode::encode_utf8(out);
  result.substitutions.clear();
  result.lineage.push_back("ablate:wo_se");
  return result;
}

PromptRecord ablate_camouflage_only(const PromptRecord& rec) {
  if (!rec.camouflage) return rec;
  std::u32string text = unicode::decode_utf8(rec.emoji_text);
  std::u32string camo = concat_codepoints(rec.camouflage->emojis);

  PromptRecord result = rec;
  if (rec.camouflage->position == InsertPosition::kPrefix) {
    size_t strip = camo.size();
    if (text.substr(0, strip) != camo) {
      throw StateError("record '" + rec.id +
                       "' camouflage does not match its emoji_text prefix");
    }
    if (strip < text.size() && unicode::is_space(text[strip])) strip++;
    for (auto& sub : result.substitutions) {
      if (sub.emoji_span) {
        sub.emoji_span = {sub.emoji_span->first - strip,
                          sub.emoji_span->second - strip};
      }
    }
    result.emoji_text = unicode::encode_utf8(text.substr(strip));
  } else {
    size_t strip = camo.size();
    if (text.size() < strip ||
        text.substr(text.size() - strip) != camo) {
      throw StateError("record '" + rec.id +
                       "' camouflage does not match its emoji_text suffix");
    }
    size_t end = text.size() - strip;
    if (end > 0 && unicode::is_space(text[end - 1])) end--;
    result.emoji_text = unicode::encode_utf8(text.substr(0, end));
  }
  result.camouflage.reset();
  result.lineage.push_back("ablate:wo_de");
  return result;
}

PromptRecord enhance_jailbreak(const std::string& template_text,
                               const Lexicon& lexicon,
                               const CamouflageSet& camouflage) {
  if (template_text.empty()) {
    throw InvalidArgument("jailbreak template must be non-empty");
  }
  PromptRecord rec = substitute_sensitive(template_text, lexicon);
  return add_camouflage(rec, camouflage, InsertPosition::kPrefix);
}

// --- translation ----------------------------------------------------------------

namespace {

std::map<std::string, int> span_multiset(const std::string& text) {
  std::map<std::string, int> counts;
  for (const auto& span : emoji::parse_emoji_spans(std::string_view(text))) {
    counts[span.sequence.hex()]++;
  }
  return counts;
}

}  // namespace

PromptRecord translate_preserving_emoji(const PromptRecord& rec,
                                        TranslationClient& translator,
                                        const std::string& target_lang) {
  std::string translated = unicode::nfc(
      translator.translate(rec.emoji_text, rec.language, target_lang));

  auto before = span_multiset(rec.emoji_text);
  auto after = span_multiset(translated);
  if (before != after) {
    std::string detail;
    for (const auto& [hexseq, count] : before) {
      int got = after.count(hexseq) ? after.at(hexseq) : 0;
      if (got != count) {
        if (!detail.empty()) detail += ", ";
        detail += hexseq + " (expected " + std::to_string(count) + ", got " +
                  std::to_string(got) + ")";
      }
    }
    for (const auto& [hexseq, count] : after) {
      if (!before.count(hexseq)) {
        if (!detail.empty()) detail += ", ";
        detail += hexseq + " (unexpected)";
      }
    }
    throw IntegrityError("translation altered emoji spans: " + detail);
  }

  PromptRecord out = rec;
  out.emoji_text = translated;
  out.language = target_lang;
  for (auto& sub : out.substitutions) sub.emoji_span.reset();
  out.lineage.push_back("translate:" + target_lang);
  return out;
}

// --- automatic craft --------------------------------------------------------------

CraftOutcome craft_with_llm(const std::string& raw, ChatClient& model,
                            const std::string& instruction,
                            const std::vector<std::string>& refusal_keywords) {
  CraftOutcome outcome;
  std::vector<ChatMessage> messages;
  constexpr std::string_view kPlaceholder = "{request}";
  size_t placeholder = instruction.find(kPlaceholder);
  if (placeholder != std::string::npos) {
    std::string prompt = instruction;
    prompt.replace(placeholder, kPlaceholder.size(), raw);
    messages.push_back({"user", prompt});
  } else {
    messages.push_back({"system", instruction});
    messages.push_back({"user", raw});
  }

  ModelResponse response;
  try {
    response = model.complete(messages, ChatOptions{});
  } catch (const Error& e) {
    outcome.failed = true;
    outcome.failure_reason = e.what();
    return outcome;
  }
  if (response.text.empty()) {
    outcome.failed = true;
    outcome.failure_reason = "model returned empty output";
    return outcome;
  }
  std::string lowered;
  lowered.reserve(response.text.size());
  for (char c : response.text) {
    lowered += static_cast<char>(
        std::tolower(static_cast<unsigned char>(c)));
  }
  for (const auto& kw : refusal_keywords) {
    std::string kw_lower;
    for (char c : kw) {
      kw_lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (!kw_lower.empty() && lowered.find(kw_lower) != std::string::npos) {
      outcome.failed = true;
      outcome.failure_reason = "model refused (matched '" + kw + "')";
      return outcome;
    }
  }

  PromptRecord rec;
  rec.raw_text = unicode::nfc(raw);
  rec.emoji_text = unicode::nfc(response.text);

  // Substitutions reconstructed by diffing emoji spans: spans present in the
  // output beyond the input's multiset are new material. Terms are unknown
  // for crafted records; the review step fills them in if needed.
  auto before = span_multiset(rec.raw_text);
  std::u32string out_text = unicode::decode_utf8(rec.emoji_text);
  for (const auto& span : emoji::parse_emoji_spans(out_text)) {
    std::string hexseq = span.sequence.hex();
    auto it = before.find(hexseq);
    if (it != before.end() && it->second > 0) {
      it->second--;
      continue;
    }
    Substitution sub;
    sub.term = "";
    sub.begin = 0;
    sub.end = 0;
    sub.emojis = {span.sequence};
    sub.emoji_span = {span.begin, span.end};
    rec.substitutions.push_back(std::move(sub));
  }

  if (rec.emoji_text == rec.raw_text) {
    outcome.warning = "model returned the input verbatim; empty lineage";
  } else {
    rec.lineage.push_back("craft");
  }
  outcome.item.record = std::move(rec);
  outcome.item.status = ReviewStatus::kPending;
  return outcome;
}

std::string collapse_whitespace(const std::string& text) {
  std::u32string u32 = unicode::decode_utf8(text);
  std::u32string out;
  bool in_space = false;
  for (char32_t cp : u32) {
    if (unicode::is_space(cp)) {
      in_space = !out.empty();
      continue;
    }
    if (in_space) out.push_back(U' ');
    in_space = false;
    out.push_back(cp);
  }
  return unicode::encode_utf8(out);
}

}  // namespace emojiprobe::transform
