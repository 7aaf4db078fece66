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

#include "emojiprobe/http_client.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "emojiprobe/errors.hpp"

namespace emojiprobe {

using json = nlohmann::json;

namespace {

struct UrlParts {
  std::string origin;
  std::string path;
};

UrlParts split_url(const std::string& url) {
  size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("URL must include a scheme: " + url);
  }
  size_t path_start = url.find('/', scheme + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string path = url.substr(path_start);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, path_start), path};
}

std::string resolve_env(const std::string& env_var, const std::string& who) {
  if (env_var.empty()) return "";
  const char* value = std::getenv(env_var.c_str());
  if (value == nullptr || *value == '\0') {
    throw AuthError("credential environment variable '" + env_var +
                    "' for " + who + " is not set");
  }
  return value;
}

[[noreturn]] void raise_http_error(const httplib::Result& result,
                                   const std::string& what) {
  if (!result) {
    throw HttpError(what + ": transport error (" +
                        httplib::to_string(result.error()) + ")",
                    /*retryable=*/true);
  }
  int status = result->status;
  if (status == 401 || status == 403) {
    throw AuthError(what + ": HTTP " + std::to_string(status));
  }
  bool retryable = status == 408 || status == 429 || status >= 500;
  throw HttpError(what + ": HTTP " + std::to_string(status) + " " +
                      result->body.substr(0, 256),
                  retryable, status);
}

double checked_logprob(const json& j, const std::string& where) {
  double lp = j.get<double>();
  if (lp > 1e-6) {
    throw ParseError(where + ": log-probability must be <= 0, got " +
                     std::to_string(lp));
  }
  return std::min(lp, 0.0);
}

}  // namespace

HttpChatClient::HttpChatClient(harness::ModelEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
  endpoint_.validate();
  api_key_ = resolve_env(endpoint_.auth_env_var,
                         "endpoint '" + endpoint_.name + "'");
  UrlParts parts = split_url(endpoint_.base_url);
  origin_ = parts.origin;
  path_prefix_ = parts.path;
}

void HttpChatClient::set_timeouts(int connect_seconds, int read_seconds) {
  connect_seconds_ = connect_seconds;
  read_seconds_ = read_seconds;
}

ModelResponse HttpChatClient::complete(
    const std::vector<ChatMessage>& messages, const ChatOptions& options) {
  json body;
  body["model"] = endpoint_.model;
  json msg_array = json::array();
  for (const auto& m : messages) {
    msg_array.push_back({{"role", m.role}, {"content", m.content}});
  }
  body["messages"] = std::move(msg_array);
  auto temperature = options.temperature ? options.temperature
                                         : endpoint_.decoding.temperature;
  if (temperature) body["temperature"] = *temperature;
  auto max_tokens =
      options.max_tokens ? options.max_tokens : endpoint_.decoding.max_tokens;
  if (max_tokens) body["max_tokens"] = *max_tokens;
  if (options.want_logprobs) {
    if (!endpoint_.supports_logprobs) {
      throw InvalidArgument("endpoint '" + endpoint_.name +
                            "' does not support logprobs");
    }
    body["logprobs"] = true;
    body["top_logprobs"] =
        options.top_logprobs > 0 ? options.top_logprobs
                                 : endpoint_.logprob_top_k;
  }

  httplib::Client client(origin_);
  client.set_connection_timeout(connect_seconds_, 0);
  client.set_read_timeout(read_seconds_, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key_);
  }

  const std::string path = path_prefix_ + "/chat/completions";
  auto result =
      client.Post(path, headers, body.dump(), "application/json");
  if (!result || result->status != 200) {
    raise_http_error(result, "endpoint '" + endpoint_.name + "' " + path);
  }

  json payload;
  try {
    payload = json::parse(result->body);
  } catch (const json::exception& e) {
    throw ParseError("endpoint '" + endpoint_.name +
                     "' returned malformed JSON: " + e.what());
  }
  try {
    const json& choice = payload.at("choices").at(0);
    ModelResponse response;
    response.text = choice.at("message").at("content").is_null()
                        ? ""
                        : choice.at("message").at("content").get<std::string>();
    response.finish_reason = choice.value("finish_reason", "");
    if (choice.contains("logprobs") && !choice.at("logprobs").is_null()) {
      const json& content = choice.at("logprobs").at("content");
      std::vector<TokenLogprob> chosen;
      for (const auto& item : content) {
        chosen.push_back(
            {item.at("token").get<std::string>(),
             checked_logprob(item.at("logprob"), "chosen token")});
      }
      if (!content.empty() && content.at(0).contains("top_logprobs")) {
        std::vector<TokenLogprob> top;
        for (const auto& item : content.at(0).at("top_logprobs")) {
          top.push_back({item.at("token").get<std::string>(),
                         checked_logprob(item.at("logprob"), "top logprob")});
        }
        response.first_token_top_logprobs = std::move(top);
      }
      response.token_logprobs = std::move(chosen);
    }
    return response;
  } catch (const json::exception& e) {
    throw ParseError("endpoint '" + endpoint_.name +
                     "' response missing required fields: " + e.what());
  }
}

HttpTranslationClient::HttpTranslationClient(const std::string& url,
                                             const std::string& auth_env_var) {
  api_key_ = resolve_env(auth_env_var, "translation service");
  UrlParts parts = split_url(url);
  origin_ = parts.origin;
  path_prefix_ = parts.path;
}

std::string HttpTranslationClient::translate(const std::string& text,
                                             const std::string& source_lang,
                                             const std::string& target_lang) {
  json body = {{"q", text}, {"source", source_lang}, {"target", target_lang}};
  if (!api_key_.empty()) body["api_key"] = api_key_;

  httplib::Client client(origin_);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(60, 0);
  auto result = client.Post(path_prefix_ + "/translate", body.dump(),
                            "application/json");
  if (!result || result->status != 200) {
    raise_http_error(result, "translation service");
  }
  try {
    return json::parse(result->body).at("translatedText").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("translation response malformed: ") +
                     e.what());
  }
}

}  // namespace emojiprobe
