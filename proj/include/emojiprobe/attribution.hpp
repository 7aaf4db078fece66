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

#ifndef EMOJIPROBE_ATTRIBUTION_HPP
#define EMOJIPROBE_ATTRIBUTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "emojiprobe/clients.hpp"

namespace emojiprobe::attribution {

// Top-k log-probabilities of the first generated token for a prompt.
class LogprobClient {
 public:
  virtual ~LogprobClient() = default;
  virtual std::vector<TokenLogprob> first_token_top_logprobs(
      const std::string& prompt) = 0;
  virtual int top_k() const = 0;
};

// LogprobClient over a chat endpoint: one-token completion with top-k
// logprobs requested. Wrap the inner client in a RetryingChatClient when
// transport retries are wanted.
class ChatLogprobClient : public LogprobClient {
 public:
  ChatLogprobClient(ChatClient& client, int top_k, std::string preamble = "")
      : client_(client), top_k_(top_k), preamble_(std::move(preamble)) {}
  std::vector<TokenLogprob> first_token_top_logprobs(
      const std::string& prompt) override;
  int top_k() const override { return top_k_; }

 private:
  ChatClient& client_;
  int top_k_;
  std::string preamble_;
};

struct PactRecord {
  std::string x;    // raw prompt
  std::string x_e;  // emoji-substituted prompt
  std::string y;    // target token: first token of the rejection response
  double lp_raw = 0.0;
  double lp_emoji = 0.0;
  double pact = 0.0;  // lp_emoji - lp_raw; negative = target suppressed
  bool lp_raw_floored = false;
  bool lp_emoji_floored = false;
  // False when y was missing from the top-k under both prompts; such
  // records are excluded from distribution statistics.
  bool resolved = true;
};

// First generated token's text. Errors when the response carries no token
// data or an empty token list.
std::string target_from_rejection(const ModelResponse& response);

// PACT(x, y) = LP(x_e, y) - LP(x, y). When y is outside a prompt's top-k
// list, its lp is floored at (min top-k lp - ln k) and flagged.
PactRecord compute_pact(LogprobClient& client, const std::string& x,
                        const std::string& x_e, const std::string& y);

struct PactSummary {
  size_t n_resolved = 0;
  size_t n_unresolved = 0;
  double mean = 0.0;
  double median = 0.0;
  double fraction_negative = 0.0;
  std::vector<double> bin_edges;
  std::vector<size_t> histogram;  // size = bin_edges.size() + 1 (open ends)
};

// Statistics over resolved records only. Errors when none are resolved.
PactSummary pact_distribution(const std::vector<PactRecord>& records,
                              const std::vector<double>& bin_edges);

struct VectorSet {
  std::string label;
  std::vector<std::vector<double>> vectors;  // equal dimension, non-empty
};

struct SeparationScore {
  double centroid_distance = 0.0;
  double silhouette = 0.0;  // in [-1, 1]
};

// Centroid distance plus the mean silhouette coefficient of the two sets
// under Euclidean distance, with set membership as the cluster labels.
SeparationScore separation_score(const VectorSet& a, const VectorSet& b);

// CSV with header label,dim0..dimN; values at 17 significant digits so the
// round trip is lossless.
void export_vectors_csv(const std::vector<VectorSet>& sets,
                        const std::string& path);
std::vector<VectorSet> load_vectors_csv(const std::string& path);

}  // namespace emojiprobe::attribution

#endif  // EMOJIPROBE_ATTRIBUTION_HPP
