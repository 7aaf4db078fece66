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

#ifndef EMOJIPROBE_CONFIG_HPP
#define EMOJIPROBE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emojiprobe {

// Key-value run configuration: one `key = value` per line, '#' comments,
// dotted keys for grouping (endpoint.<name>.<field>). Values are verbatim
// after trimming; later assignments win.
class Config {
 public:
  Config() = default;
  static Config parse(std::string_view text,
                      const std::string& origin = "<config>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get(const std::string& key,
                  const std::string& fallback = "") const;
  std::string require(const std::string& key) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list; empty value -> empty list.
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;

  // Distinct middle segments of keys matching <prefix>.<segment>.<rest>.
  std::vector<std::string> group_names(const std::string& prefix) const;

  // Canonical sorted serialization; what the manifest hash covers.
  std::string canonical_text() const;
  uint64_t hash() const;  // FNV-1a over canonical_text

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace emojiprobe

#endif  // EMOJIPROBE_CONFIG_HPP
