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

#ifndef EMOJIPROBE_ERRORS_HPP
#define EMOJIPROBE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emojiprobe {

// Stable error categories; mirrored one-to-one by the C API status codes.
enum class ErrorCode {
  kIo = 1,
  kParse = 2,
  kConflict = 3,
  kInvalidArgument = 4,
  kUnresolvedEmoji = 5,
  kState = 6,
  kHttp = 7,
  kAuth = 8,
  kIntegrity = 9,
  kConfig = 10,
  kNotFound = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCode::kParse, what) {}
  ParseError(const std::string& file, size_t line, const std::string& what)
      : Error(ErrorCode::kParse,
              file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_ = 0;
};

class ConflictError : public Error {
 public:
  explicit ConflictError(const std::string& what)
      : Error(ErrorCode::kConflict, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

class UnresolvedEmojiError : public Error {
 public:
  explicit UnresolvedEmojiError(const std::string& what)
      : Error(ErrorCode::kUnresolvedEmoji, what) {}
};

class StateError : public Error {
 public:
  explicit StateError(const std::string& what)
      : Error(ErrorCode::kState, what) {}
};

// retryable() distinguishes transient transport failures (timeouts, rate
// limits, 5xx) from permanent ones.
class HttpError : public Error {
 public:
  HttpError(const std::string& what, bool retryable, int status = 0)
      : Error(ErrorCode::kHttp, what), retryable_(retryable), status_(status) {}
  bool retryable() const { return retryable_; }
  int status() const { return status_; }

 private:
  bool retryable_;
  int status_;
};

class AuthError : public Error {
 public:
  explicit AuthError(const std::string& what) : Error(ErrorCode::kAuth, what) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what)
      : Error(ErrorCode::kIntegrity, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

}  // namespace emojiprobe

#endif  // EMOJIPROBE_ERRORS_HPP
