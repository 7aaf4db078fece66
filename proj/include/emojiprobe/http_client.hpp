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

#ifndef EMOJIPROBE_HTTP_CLIENT_HPP
#define EMOJIPROBE_HTTP_CLIENT_HPP

#include <string>

#include "emojiprobe/clients.hpp"
#include "emojiprobe/harness.hpp"

namespace emojiprobe {

// Chat-completions wire client. Credentials come only from the endpoint's
// auth_env_var; a missing variable is an auth configuration error raised at
// construction, before any network traffic.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(harness::ModelEndpoint endpoint);
  ModelResponse complete(const std::vector<ChatMessage>& messages,
                         const ChatOptions& options) override;

  void set_timeouts(int connect_seconds, int read_seconds);

 private:
  harness::ModelEndpoint endpoint_;
  std::string api_key_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. /v1
  int connect_seconds_ = 10;
  int read_seconds_ = 120;
};

// Minimal text-translation client: POST <origin><path>/translate with
// {"q","source","target"}, expecting {"translatedText"}.
class HttpTranslationClient : public TranslationClient {
 public:
  explicit HttpTranslationClient(const std::string& url,
                                 const std::string& auth_env_var = "");
  std::string translate(const std::string& text,
                        const std::string& source_lang,
                        const std::string& target_lang) override;

 private:
  std::string api_key_;
  std::string origin_;
  std::string path_prefix_;
};

}  // namespace emojiprobe

#endif  // EMOJIPROBE_HTTP_CLIENT_HPP
