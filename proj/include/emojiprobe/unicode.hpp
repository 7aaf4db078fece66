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

#ifndef EMOJIPROBE_UNICODE_HPP
#define EMOJIPROBE_UNICODE_HPP

#include <string>
#include <string_view>

namespace emojiprobe::unicode {

// Lenient UTF-8 decoding: ill-formed byte sequences become U+FFFD, one
// replacement per undecodable byte. Corpus inputs are noisy and must not
// hard-fail.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view codepoints);
std::string encode_utf8(char32_t codepoint);

// Canonical composition (NFC).
std::string nfc(std::string_view text);
std::u32string nfc(std::u32string_view codepoints);

bool is_letter(char32_t cp);  // general category L*
bool is_number(char32_t cp);  // general category N*
bool is_space(char32_t cp);   // White_Space property
// Word characters for term-boundary detection: letters, numbers, underscore.
bool is_word_char(char32_t cp);

char32_t to_lower(char32_t cp);
std::u32string to_lower(std::u32string_view codepoints);

}  // namespace emojiprobe::unicode

#endif  // EMOJIPROBE_UNICODE_HPP
