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

#ifndef EMOJIPROBE_CLIENTS_HPP
#define EMOJIPROBE_CLIENTS_HPP

#include <optional>
#include <string>
#include <vector>

namespace emojiprobe {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatOptions {
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  bool want_logprobs = false;
  int top_logprobs = 0;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;  // natural log, <= 0
};

struct ModelResponse {
  std::string text;
  // Chosen-token logprobs, present only when the endpoint supports them.
  std::optional<std::vector<TokenLogprob>> token_logprobs;
  // Top-k alternatives at the first generated position.
  std::optional<std::vector<TokenLogprob>> first_token_top_logprobs;
  std::string finish_reason;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual ModelResponse complete(const std::vector<ChatMessage>& messages,
                                 const ChatOptions& options) = 0;
};

class TranslationClient {
 public:
  virtual ~TranslationClient() = default;
  virtual std::string translate(const std::string& text,
                                const std::string& source_lang,
                                const std::string& target_lang) = 0;
};

}  // namespace emojiprobe

#endif  // EMOJIPROBE_CLIENTS_HPP
